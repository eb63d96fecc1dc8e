#include "contactk/geometry/forms.hpp"

#include <sstream>

#include "contactk/error.hpp"
#include "contactk/symexpr/zero_test.hpp"

namespace contactk::geo {

namespace {

void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
  if (a != b && (a->coordinates().size() != b->coordinates().size())) {
    throw Error("operands live on different charts");
  }
  if (a != b) {
    for (std::size_t i = 0; i < a->dimension(); ++i) {
      if (a->coordinate(i).name != b->coordinate(i).name) throw Error("operands live on different charts");
    }
  }
}

std::string coefficient_text(const Expr& c) {
  const std::string t = sym::to_string(c);
  return c.kind() == sym::Kind::Sum ? "(" + t + ")" : t;
}

}  // namespace

OneForm::OneForm(ChartPtr ch) : chart(std::move(ch)), c(chart->dimension()) {}
OneForm::OneForm(ChartPtr ch, std::vector<Expr> coefficients) : chart(std::move(ch)), c(std::move(coefficients)) {
  if (c.size() != chart->dimension()) throw Error("one-form size does not match chart");
}

TwoForm::TwoForm(ChartPtr ch) : chart(std::move(ch)), c(chart->dimension(), std::vector<Expr>(chart->dimension())) {}

VectorField::VectorField(ChartPtr ch) : chart(std::move(ch)), c(chart->dimension()) {}
VectorField::VectorField(ChartPtr ch, std::vector<Expr> components)
    : chart(std::move(ch)), c(std::move(components)) {
  if (c.size() != chart->dimension()) throw Error("vector field size does not match chart");
}

OneForm operator+(const OneForm& a, const OneForm& b) {
  require_same_chart(a.chart, b.chart);
  OneForm out(a.chart);
  for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = a.c[i] + b.c[i];
  return out;
}

OneForm operator-(const OneForm& a, const OneForm& b) {
  require_same_chart(a.chart, b.chart);
  OneForm out(a.chart);
  for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = a.c[i] - b.c[i];
  return out;
}

OneForm operator*(const Expr& f, const OneForm& a) {
  OneForm out(a.chart);
  for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = f * a.c[i];
  return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same_chart(a.chart, b.chart);
  VectorField out(a.chart);
  for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = a.c[i] + b.c[i];
  return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_chart(a.chart, b.chart);
  VectorField out(a.chart);
  for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = a.c[i] - b.c[i];
  return out;
}

VectorField operator*(const Expr& f, const VectorField& a) {
  VectorField out(a.chart);
  for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = f * a.c[i];
  return out;
}

TwoForm operator-(const TwoForm& a, const TwoForm& b) {
  require_same_chart(a.chart, b.chart);
  TwoForm out(a.chart);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    for (std::size_t j = 0; j < a.c.size(); ++j) out.c[i][j] = a.c[i][j] - b.c[i][j];
  }
  return out;
}

OneForm canonical_one_form(const ChartPtr& phase) {
  OneForm out(phase);
  for (std::size_t i = 0; i < phase->n(); ++i) out.c[phase->position_index(i)] = -phase->fiber(i);
  out.c[phase->action_index()] = Expr(1);
  return out;
}

OneForm d(const Expr& f, const ChartPtr& chart) {
  OneForm out(chart);
  for (std::size_t a = 0; a < chart->dimension(); ++a) out.c[a] = sym::diff(f, chart->coordinate(a));
  return out;
}

TwoForm d(const OneForm& w) {
  const auto& chart = w.chart;
  const std::size_t n = chart->dimension();
  std::vector<std::vector<Expr>> partial(n, std::vector<Expr>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) partial[a][b] = sym::diff(w.c[b], chart->coordinate(a));
  }
  TwoForm out(chart);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      out.c[a][b] = partial[a][b] - partial[b][a];
      out.c[b][a] = -out.c[a][b];
    }
  }
  return out;
}

TwoForm wedge(const OneForm& a, const OneForm& b) {
  require_same_chart(a.chart, b.chart);
  TwoForm out(a.chart);
  const std::size_t n = a.c.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out.c[i][j] = a.c[i] * b.c[j] - a.c[j] * b.c[i];
      out.c[j][i] = -out.c[i][j];
    }
  }
  return out;
}

Expr interior(const VectorField& x, const OneForm& w) {
  require_same_chart(x.chart, w.chart);
  std::vector<Expr> terms;
  for (std::size_t a = 0; a < x.c.size(); ++a) terms.push_back(x.c[a] * w.c[a]);
  return sym::sum(terms);
}

OneForm interior(const VectorField& x, const TwoForm& omega) {
  require_same_chart(x.chart, omega.chart);
  OneForm out(omega.chart);
  const std::size_t n = x.c.size();
  for (std::size_t b = 0; b < n; ++b) {
    std::vector<Expr> terms;
    for (std::size_t a = 0; a < n; ++a) {
      if (!omega.c[a][b].is_zero() && !x.c[a].is_zero()) terms.push_back(x.c[a] * omega.c[a][b]);
    }
    out.c[b] = sym::sum(terms);
  }
  return out;
}

Expr apply(const VectorField& x, const Expr& f) {
  std::vector<Expr> terms;
  for (std::size_t a = 0; a < x.c.size(); ++a) {
    if (x.c[a].is_zero()) continue;
    terms.push_back(x.c[a] * sym::diff(f, x.chart->coordinate(a)));
  }
  return sym::sum(terms);
}

OneForm pullback(const OneForm& w, const sym::Bindings& images, const ChartPtr& target) {
  OneForm out(target);
  const auto& source = w.chart;
  std::vector<Expr> image(source->dimension());
  std::vector<Expr> coefficient(source->dimension());
  for (std::size_t a = 0; a < source->dimension(); ++a) {
    const Symbol& x = source->coordinate(a);
    auto it = images.find(x.name);
    image[a] = it == images.end() ? Expr(x) : it->second;
    coefficient[a] = sym::substitute(w.c[a], images);
  }
  for (std::size_t b = 0; b < target->dimension(); ++b) {
    std::vector<Expr> terms;
    for (std::size_t a = 0; a < source->dimension(); ++a) {
      if (coefficient[a].is_zero()) continue;
      terms.push_back(coefficient[a] * sym::diff(image[a], target->coordinate(b)));
    }
    out.c[b] = sym::sum(terms);
  }
  return out;
}

OneForm substitute(const OneForm& w, const sym::Bindings& b) {
  OneForm out(w.chart);
  for (std::size_t i = 0; i < w.c.size(); ++i) out.c[i] = sym::substitute(w.c[i], b);
  return out;
}

VectorField substitute(const VectorField& x, const sym::Bindings& b) {
  VectorField out(x.chart);
  for (std::size_t i = 0; i < x.c.size(); ++i) out.c[i] = sym::substitute(x.c[i], b);
  return out;
}

bool is_zero(const OneForm& w) {
  for (const auto& e : w.c) {
    if (!sym::is_zero(e)) return false;
  }
  return true;
}

bool is_zero(const TwoForm& w) {
  for (const auto& row : w.c) {
    for (const auto& e : row) {
      if (!sym::is_zero(e)) return false;
    }
  }
  return true;
}

bool is_zero(const VectorField& x) {
  for (const auto& e : x.c) {
    if (!sym::is_zero(e)) return false;
  }
  return true;
}

bool is_antisymmetric(const TwoForm& w) {
  const std::size_t n = w.c.size();
  for (std::size_t a = 0; a < n; ++a) {
    if (!w.c[a][a].is_zero()) return false;
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!(w.c[a][b] + w.c[b][a]).is_zero()) return false;
    }
  }
  return true;
}

std::string to_string(const OneForm& w) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t a = 0; a < w.c.size(); ++a) {
    if (w.c[a].is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    if (!w.c[a].is_one()) os << coefficient_text(w.c[a]) << "*";
    os << "d" << w.chart->coordinate(a).name;
  }
  if (first) os << "0";
  return os.str();
}

std::string to_string(const TwoForm& w) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t a = 0; a < w.c.size(); ++a) {
    for (std::size_t b = a + 1; b < w.c.size(); ++b) {
      if (w.c[a][b].is_zero()) continue;
      if (!first) os << " + ";
      first = false;
      if (!w.c[a][b].is_one()) os << coefficient_text(w.c[a][b]) << "*";
      os << "d" << w.chart->coordinate(a).name << "^d" << w.chart->coordinate(b).name;
    }
  }
  if (first) os << "0";
  return os.str();
}

std::string to_string(const VectorField& x) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t a = 0; a < x.c.size(); ++a) {
    if (x.c[a].is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    if (!x.c[a].is_one()) os << coefficient_text(x.c[a]) << "*";
    os << "d/d" << x.chart->coordinate(a).name;
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace contactk::geo
