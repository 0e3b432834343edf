#pragma once

#include <string>

#include <json.hpp>

#include "fracspec/manifold.hpp"
#include "fracspec/metric_graph.hpp"
#include "fracspec/pcf_system.hpp"
#include "fracspec/rational.hpp"
#include "fracspec/weighted_graph.hpp"

namespace fracspec {

/// On-disk shapes. All emitters are deterministic (keys serialize sorted,
/// numbers as shortest round-trip doubles); exact quantities additionally
/// carry their string form ("3/5", "1/10*sqrt(5)") so reports stay readable
/// and diffable.

nlohmann::json graph_to_json(const WeightedGraph& g);
nlohmann::json metric_to_json(const MetricGraph& mg);
nlohmann::json rate_to_json(const GeometricRate& rate);
nlohmann::json plan_to_json(const ScalingPlan& plan);
nlohmann::json manifold_table_to_json(const std::vector<ManifoldCaseRow>& rows);

/// Reads a self-similar system description:
///   {"N": 3, "N0": 3, "theta": "1/2", "r": "3/5",
///    "gamma0": ["1", "1", "1"], "gluing": [[1,2,2,1], ...]}
/// Numbers may be given as exact strings "p/q" or as doubles whose binary
/// expansion is an exact rational (0.5 works, 0.6 does not — use "3/5").
/// Throws ConfigError on malformed input; the result is fully validated.
PcfSystem pcf_system_from_json(const nlohmann::json& j);
PcfSystem load_pcf_system(const std::string& path);

/// Exact rational from a JSON number or "p/q" string; ConfigError otherwise.
Rational rational_from_json(const nlohmann::json& j, const std::string& what);

/// Writes via a temporary file in the same directory plus rename, so
/// readers never observe a half-written file.
void write_text_atomic(const std::string& path, const std::string& text);

/// Fixed 17-significant-digit formatting; the same bytes for the same
/// double on every run and platform.
std::string format_double(double x);

} // namespace fracspec
