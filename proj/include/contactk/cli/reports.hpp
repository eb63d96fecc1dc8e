#pragma once

#include "contactk/cli/session.hpp"
#include "json.hpp"

namespace contactk::cli {

using Json = nlohmann::ordered_json;

/// Closed forms above this node count are reported by name only.
inline constexpr std::size_t kReportSizeCap = 400;

Json analyze_report(const LoadedModel& lm);
Json constraints_report(const LoadedModel& lm, int max_iter);
Json evolution_report(const LoadedModel& lm);

Json to_json(const geo::OneForm& w);
Json to_json(const geo::VectorField& x);
std::string capped(const Expr& e);

}  // namespace contactk::cli
