#pragma once

#include <cstdint>
#include <string>

#include "fracspec/metric_graph.hpp"
#include "fracspec/pcf_system.hpp"
#include "fracspec/rational.hpp"

namespace fracspec {

/// Everything a subcommand needs, assembled by the flag parser and
/// validated by validate_config. Exactly one of preset_name / config_path
/// is set.
struct RunConfig {
    std::string preset_name;
    std::string config_path;
    int m_lo = 0;
    int m_hi = 0;
    ScalingCase tag = ScalingCase::geometric;
    bool custom_ratio = false;  // --lambda given: tag becomes custom
    SqrtRational lambda;
    SqrtRational ell00{Rational(1)};
    double h_target = 0.0;  // 0: coarsest mesh (two interior nodes per edge)
    int k = 8;              // eigenvalue table length
    bool assert_bounds = false;
    std::string out_dir = ".";
    std::uint64_t seed = 0;  // recorded in outputs; no command draws randomness yet
    int threads = 1;
};

/// Throws ConfigError on violated invariants (range, k, mesh, source).
void validate_config(const RunConfig& cfg);

/// The system named by the config: preset or JSON file.
PcfSystem resolve_system(const RunConfig& cfg);

/// Reads FRACSPEC_THREADS (caps parallel per-generation jobs); falls back
/// to the hardware count.
int thread_budget();

/// Writes graph_m{m}.json / metric_m{m}.json / plan_m{m}.json per
/// generation. Returns the process exit code (0).
int cmd_generate(const RunConfig& cfg);

/// Measures one report per generation (parallel up to cfg.threads), then
/// writes que_m{m}.json, convergence.csv, spectra.csv, rates.csv. With
/// assert_bounds also checks every measured defect against the closed-form
/// bound plus the mesh-error estimate and returns 4 on any violation.
int cmd_converge(const RunConfig& cfg);

/// Writes the three-row scaling-case table (mfd_params.json / .csv) and
/// prints it. Returns 0.
int cmd_mfd_params(const RunConfig& cfg);

} // namespace fracspec
