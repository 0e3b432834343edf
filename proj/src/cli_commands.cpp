#include "fracspec/cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "fracspec/errors.hpp"
#include "fracspec/json_io.hpp"
#include "fracspec/manifold.hpp"
#include "fracspec/que_report.hpp"

namespace fracspec {

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

/// Interior nodes per edge for a target mesh width, sized by the longest
/// edge (the preset chains are equilateral within a generation anyway).
int interior_for(const MetricGraph& mg, double h_target) {
    if (h_target <= 0.0) return 2;
    const int segments = static_cast<int>(std::ceil(mg.ell_max() / h_target));
    return std::max(2, segments - 1);
}

struct Generation {
    int m = 0;
    LevelGraph level;
    MetricGraph mg;
    ScalingPlan plan;
};

Generation build_generation(const PcfSystem& sys, const RunConfig& cfg, int m) {
    Generation gen;
    gen.m = m;
    gen.level = level_graph(sys, m);
    auto [mg, plan] = cfg.custom_ratio
                          ? assign_lengths(sys, gen.level, cfg.lambda, cfg.ell00)
                          : assign_lengths(sys, gen.level, cfg.tag);
    gen.mg = std::move(mg);
    gen.plan = std::move(plan);
    return gen;
}

/// Least-squares geometric decay ratio of y_m over the given generations;
/// NaN when fewer than two values are above the noise floor.
double fitted_ratio(const std::vector<int>& ms, const std::vector<double>& ys) {
    std::vector<double> x, y;
    for (size_t i = 0; i < ys.size(); ++i) {
        if (ys[i] > 1e-14) {
            x.push_back(ms[i]);
            y.push_back(std::log(ys[i]));
        }
    }
    if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return std::exp(sxy / sxx);
}

std::string run_config_json(const RunConfig& cfg) {
    nlohmann::json j;
    if (!cfg.preset_name.empty()) j["preset"] = cfg.preset_name;
    if (!cfg.config_path.empty()) j["config"] = cfg.config_path;
    j["m_lo"] = cfg.m_lo;
    j["m_hi"] = cfg.m_hi;
    j["case"] = cfg.custom_ratio ? "custom"
                : cfg.tag == ScalingCase::geometric        ? "geometric"
                : cfg.tag == ScalingCase::inverse_weight   ? "inverse-weight"
                                                           : "unit-tau";
    if (cfg.custom_ratio) {
        j["lambda"] = cfg.lambda.to_string();
        j["ell00"] = cfg.ell00.to_string();
    }
    j["mesh_h"] = cfg.h_target;
    j["k"] = cfg.k;
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

} // namespace

void validate_config(const RunConfig& cfg) {
    if (cfg.preset_name.empty() == cfg.config_path.empty())
        throw ConfigError("exactly one of --preset and --config is required");
    if (cfg.m_lo < 0 || cfg.m_hi < cfg.m_lo)
        throw ConfigError("generation range must satisfy 0 <= m_lo <= m_hi, got " +
                          std::to_string(cfg.m_lo) + ".." + std::to_string(cfg.m_hi));
    if (cfg.k < 1) throw ConfigError("eigenvalue count must be at least 1");
    if (cfg.h_target < 0.0) throw ConfigError("mesh width must be positive");
    if (cfg.custom_ratio) {
        const SqrtRational zero{Rational(0)};
        if (!(zero < cfg.lambda))
            throw ConfigError("--lambda must be positive");
        if (!(zero < cfg.ell00)) throw ConfigError("--ell00 must be positive");
    }
}

PcfSystem resolve_system(const RunConfig& cfg) {
    if (!cfg.preset_name.empty()) return preset(cfg.preset_name);
    return load_pcf_system(cfg.config_path);
}

int thread_budget() {
    const int hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRACSPEC_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1)
            throw ConfigError(std::string("FRACSPEC_THREADS must be a positive integer, got \"") +
                              env + "\"");
        return static_cast<int>(std::min<long>(n, hw));
    }
    return hw;
}

int cmd_generate(const RunConfig& cfg) {
    validate_config(cfg);
    auto sys = resolve_system(cfg);
    for (int m = cfg.m_lo; m <= cfg.m_hi; ++m) {
        auto gen = build_generation(sys, cfg, m);
        const std::string suffix = "_m" + std::to_string(m) + ".json";
        write_text_atomic(out_path(cfg, "graph" + suffix),
                          graph_to_json(gen.level.graph).dump(2) + "\n");
        write_text_atomic(out_path(cfg, "metric" + suffix),
                          metric_to_json(gen.mg).dump(2) + "\n");
        write_text_atomic(out_path(cfg, "plan" + suffix), plan_to_json(gen.plan).dump(2) + "\n");
        std::printf("m=%d vertices=%d edges=%zu total_length=%s\n", m, gen.level.graph.n(),
                    gen.mg.length.size(), format_double(gen.mg.total_length()).c_str());
    }
    write_text_atomic(out_path(cfg, "run_config.json"), run_config_json(cfg));
    return 0;
}

int cmd_converge(const RunConfig& cfg) {
    validate_config(cfg);
    auto sys = resolve_system(cfg);
    const int count = cfg.m_hi - cfg.m_lo + 1;

    auto job = [&](int i) {
        auto gen = build_generation(sys, cfg, cfg.m_lo + i);
        const int interior = interior_for(gen.mg, cfg.h_target);
        return measure_with_refinement(gen.level, gen.mg, gen.plan, interior, cfg.k);
    };

    std::vector<QueReport> reports(count);
    const int waves = std::max(1, std::min(cfg.threads, count));
    if (waves == 1) {
        for (int i = 0; i < count; ++i) reports[i] = job(i);
    } else {
        for (int base = 0; base < count; base += waves) {
            const int hi = std::min(base + waves, count);
            std::vector<std::future<QueReport>> wave;
            wave.reserve(hi - base);
            for (int i = base; i < hi; ++i)
                wave.push_back(std::async(std::launch::async, job, i));
            for (int i = base; i < hi; ++i) reports[i] = wave[i - base].get();
        }
    }

    // per-generation reports
    for (int i = 0; i < count; ++i)
        write_text_atomic(out_path(cfg, "que_m" + std::to_string(cfg.m_lo + i) + ".json"),
                          reports[i].to_json());

    // defect trajectory
    std::string csv =
        "m,delta_theory,delta_op_theory,normJ,adjointDefect,jpj,jjp,compat1,compat2,"
        "formCloseness,opDefect,fem_normJ,fem_adjointDefect,fem_jpj,fem_jjp,fem_compat1,"
        "fem_compat2,fem_formCloseness,fem_opDefect,hausdorff_resolvent\n";
    for (int i = 0; i < count; ++i) {
        const auto& r = reports[i];
        const double cells[] = {r.delta_theory,          r.delta_op_theory,
                                r.measured.normJ,        r.measured.adjointDefect,
                                r.measured.jpj,          r.measured.jjp,
                                r.measured.compat1,      r.measured.compat2,
                                r.measured.formCloseness, r.measured.opDefect,
                                r.fem_error.normJ,       r.fem_error.adjointDefect,
                                r.fem_error.jpj,         r.fem_error.jjp,
                                r.fem_error.compat1,     r.fem_error.compat2,
                                r.fem_error.formCloseness, r.fem_error.opDefect,
                                r.hausdorff_resolvent};
        csv += std::to_string(cfg.m_lo + i);
        for (double c : cells) csv += "," + format_double(c);
        csv += "\n";
    }
    write_text_atomic(out_path(cfg, "convergence.csv"), csv);

    // eigenvalue tables
    std::string spectra = "m,k,lambda_discrete,lambda_metric,abs_diff\n";
    for (int i = 0; i < count; ++i)
        for (const auto& row : reports[i].eigenvalues)
            spectra += std::to_string(cfg.m_lo + i) + "," + std::to_string(row.k) + "," +
                       format_double(row.lambda_discrete) + "," +
                       format_double(row.lambda_metric) + "," + format_double(row.diff) + "\n";
    write_text_atomic(out_path(cfg, "spectra.csv"), spectra);

    // fitted per-k decay of the eigenvalue differences
    std::vector<int> ms(count);
    for (int i = 0; i < count; ++i) ms[i] = cfg.m_lo + i;
    int k_common = cfg.k;
    for (const auto& r : reports) k_common = std::min<int>(k_common, r.eigenvalues.size());
    std::string rates = "k,fitted_ratio\n";
    for (int k = 2; k <= k_common; ++k) {
        std::vector<double> diffs(count);
        for (int i = 0; i < count; ++i) diffs[i] = reports[i].eigenvalues[k - 1].diff;
        const double ratio = fitted_ratio(ms, diffs);
        rates += std::to_string(k) + "," + format_double(ratio) + "\n";
        std::printf("eigenvalue k=%d fitted decay ratio %.4g per generation\n", k, ratio);
    }
    write_text_atomic(out_path(cfg, "rates.csv"), rates);
    write_text_atomic(out_path(cfg, "run_config.json"), run_config_json(cfg));

    for (int i = 0; i < count; ++i) {
        const auto& r = reports[i];
        std::printf("m=%d delta=%.4g jpj=%.4g jjp=%.4g compat2=%.4g form=%.4g op/4=%.4g "
                    "hausdorff=%.4g\n",
                    cfg.m_lo + i, r.delta_theory, r.measured.jpj, r.measured.jjp,
                    r.measured.compat2, r.measured.formCloseness, r.measured.opDefect / 4.0,
                    r.hausdorff_resolvent);
    }

    if (!cfg.assert_bounds) return 0;

    int violations = 0;
    auto check = [&](int m, const char* name, double value, double budget) {
        if (value > budget) {
            std::fprintf(stderr, "BOUND VIOLATION m=%d %s: %.17g > %.17g\n", m, name, value,
                         budget);
            ++violations;
        }
    };
    for (int i = 0; i < count; ++i) {
        const auto& r = reports[i];
        const int m = cfg.m_lo + i;
        const double slack = 1e-12;
        check(m, "normJ", r.measured.normJ, 1.0 + 1e-10);
        check(m, "adjointDefect", r.measured.adjointDefect,
              r.delta_theory + r.fem_error.adjointDefect + slack);
        check(m, "jpj", r.measured.jpj, r.delta_theory + r.fem_error.jpj + slack);
        check(m, "jjp", r.measured.jjp, r.delta_theory + r.fem_error.jjp + slack);
        check(m, "compat2", r.measured.compat2, r.delta_theory + r.fem_error.compat2 + slack);
        check(m, "formCloseness", r.measured.formCloseness,
              r.delta_theory + r.fem_error.formCloseness + slack);
        check(m, "opDefect/4", r.measured.opDefect / 4.0,
              r.delta_theory + r.fem_error.opDefect / 4.0 + slack);
    }
    if (violations > 0) {
        std::fprintf(stderr, "%d bound violation(s)\n", violations);
        return 4;
    }
    std::printf("all measured defects within the closed-form bound\n");
    return 0;
}

int cmd_mfd_params(const RunConfig& cfg) {
    validate_config(cfg);
    auto sys = resolve_system(cfg);
    auto rows = manifold_case_table(sys, 2);

    write_text_atomic(out_path(cfg, "mfd_params.json"),
                      manifold_table_to_json(rows).dump(2) + "\n");

    std::string csv =
        "case,lambda,window_lo,window_hi,eps_star,eps_star_value,ell_ratio,tau_ratio,"
        "c_sq_ratio,delta_sq_ratio\n";
    for (const auto& row : rows)
        csv += row.label + "," + row.lambda.to_string() + "," + row.window_lo.to_string() + "," +
               row.window_hi.to_string() + "," + row.eps_star.to_string() + "," +
               format_double(row.eps_star.to_double()) + "," + row.ell_rate.ratio.to_string() +
               "," + row.tau_rate.ratio.to_string() + "," + row.c_sq_rate.ratio.to_string() +
               "," + row.delta_sq_rate.ratio.to_string() + "\n";
    write_text_atomic(out_path(cfg, "mfd_params.csv"), csv);

    std::printf("%-15s %-12s %-22s %-18s %-12s %-18s\n", "case", "lengths", "transversal window",
                "balanced eps", "tau rate", "c^2 rate");
    for (const auto& row : rows)
        std::printf("%-15s (%s)^m     (%s, %s)  %-18s (%s)^m  (%s)^m\n", row.label.c_str(),
                    row.lambda.to_string().c_str(), row.window_lo.to_string().c_str(),
                    row.window_hi.to_string().c_str(), row.eps_star.to_string().c_str(),
                    row.tau_rate.ratio.to_string().c_str(),
                    row.c_sq_rate.ratio.to_string().c_str());
    return 0;
}

} // namespace fracspec
