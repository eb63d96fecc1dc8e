#pragma once

#include <vector>

#include "contactk/geometry/chart.hpp"

namespace contactk::geo {

/// Coefficients on the coordinate coframe dx^a of a chart.
struct OneForm {
  ChartPtr chart;
  std::vector<Expr> c;

  explicit OneForm(ChartPtr ch);
  OneForm(ChartPtr ch, std::vector<Expr> coefficients);
};

/// omega = sum_{a<b} c[a][b] dx^a ^ dx^b, stored as the full antisymmetric table.
struct TwoForm {
  ChartPtr chart;
  std::vector<std::vector<Expr>> c;

  explicit TwoForm(ChartPtr ch);
};

struct VectorField {
  ChartPtr chart;
  std::vector<Expr> c;

  explicit VectorField(ChartPtr ch);
  VectorField(ChartPtr ch, std::vector<Expr> components);
};

OneForm operator+(const OneForm& a, const OneForm& b);
OneForm operator-(const OneForm& a, const OneForm& b);
OneForm operator*(const Expr& f, const OneForm& a);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& f, const VectorField& a);
TwoForm operator-(const TwoForm& a, const TwoForm& b);

/// ds - sum_i p_i dq^i on a phase chart.
OneForm canonical_one_form(const ChartPtr& phase);

OneForm d(const Expr& f, const ChartPtr& chart);

/// c[a][b] = d_a w_b - d_b w_a.
TwoForm d(const OneForm& w);

TwoForm wedge(const OneForm& a, const OneForm& b);

Expr interior(const VectorField& x, const OneForm& w);

/// (i_X omega)_b = sum_a X^a c[a][b].
OneForm interior(const VectorField& x, const TwoForm& omega);

/// X(f) = sum_a X^a df/dx^a.
Expr apply(const VectorField& x, const Expr& f);

/// Pullback of a form on `source` along the map whose coordinate functions
/// are given by `images` (source coordinate name -> expression on `target`).
/// Source coordinates not listed map to the target symbol of the same name.
OneForm pullback(const OneForm& w, const sym::Bindings& images, const ChartPtr& target);

/// Componentwise substitution.
OneForm substitute(const OneForm& w, const sym::Bindings& b);
VectorField substitute(const VectorField& x, const sym::Bindings& b);

/// Componentwise probabilistic zero test.
bool is_zero(const OneForm& w);
bool is_zero(const TwoForm& w);
bool is_zero(const VectorField& x);
bool is_antisymmetric(const TwoForm& w);

std::string to_string(const OneForm& w);
std::string to_string(const TwoForm& w);
std::string to_string(const VectorField& x);

}  // namespace contactk::geo
