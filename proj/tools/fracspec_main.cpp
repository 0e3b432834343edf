#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "fracspec/cli_commands.hpp"
#include "fracspec/errors.hpp"

namespace {

using fracspec::ConfigError;
using fracspec::RunConfig;

/// "a..b" or a single generation "a".
void parse_m_range(const std::string& text, RunConfig& cfg) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            cfg.m_lo = cfg.m_hi = std::stoi(text);
        } else {
            cfg.m_lo = std::stoi(text.substr(0, dots));
            cfg.m_hi = std::stoi(text.substr(dots + 2));
        }
    } catch (const std::exception&) {
        throw ConfigError("cannot parse generation range \"" + text + "\" (want \"a..b\")");
    }
}

fracspec::SqrtRational parse_ratio(const std::string& text, const char* what) {
    auto r = fracspec::Rational::parse(text);
    if (!r) throw ConfigError(std::string(what) + ": cannot parse \"" + text + "\" (want \"p/q\")");
    return fracspec::SqrtRational(*r);
}

void add_common_flags(CLI::App* cmd, RunConfig& cfg, std::string& m_range, std::string& case_name,
                      std::string& lambda, std::string& ell00) {
    cmd->add_option("--preset", cfg.preset_name, "built-in system (interval | sierpinski)");
    cmd->add_option("--config", cfg.config_path, "system description JSON file");
    cmd->add_option("--m-range", m_range, "generations, \"a..b\" or a single \"a\"");
    cmd->add_option("--case", case_name,
                    "length assignment: geometric | inverse-weight | unit-tau");
    cmd->add_option("--lambda", lambda, "custom per-generation length ratio \"p/q\"");
    cmd->add_option("--ell00", ell00, "custom base length \"p/q\" (with --lambda)");
    cmd->add_option("--mesh", cfg.h_target, "target mesh width (default: 2 interior nodes/edge)");
    cmd->add_option("--k", cfg.k, "eigenvalues per comparison table");
    cmd->add_flag("--assert", cfg.assert_bounds, "exit 4 if any defect exceeds its bound");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--seed", cfg.seed, "seed recorded with the outputs");
}

void finish_config(RunConfig& cfg, const std::string& m_range, const std::string& case_name,
                   const std::string& lambda, const std::string& ell00) {
    if (!m_range.empty()) parse_m_range(m_range, cfg);
    if (!case_name.empty()) {
        if (case_name == "geometric")
            cfg.tag = fracspec::ScalingCase::geometric;
        else if (case_name == "inverse-weight")
            cfg.tag = fracspec::ScalingCase::inverse_weight;
        else if (case_name == "unit-tau")
            cfg.tag = fracspec::ScalingCase::unit_tau;
        else
            throw ConfigError("unknown case \"" + case_name +
                              "\" (want geometric | inverse-weight | unit-tau)");
    }
    if (!lambda.empty()) {
        cfg.custom_ratio = true;
        cfg.lambda = parse_ratio(lambda, "--lambda");
        if (!ell00.empty()) cfg.ell00 = parse_ratio(ell00, "--ell00");
    } else if (!ell00.empty()) {
        throw ConfigError("--ell00 requires --lambda");
    }
    cfg.threads = fracspec::thread_budget();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral convergence reports for fractal approximation chains"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string m_range, case_name, lambda, ell00;

    auto* generate =
        app.add_subcommand("generate", "write level-graph / metric-graph / scaling files");
    auto* converge =
        app.add_subcommand("converge", "measure distance defects and spectra per generation");
    auto* mfd = app.add_subcommand("mfd-params", "tube-parameter table for the scaling cases");
    for (auto* cmd : {generate, converge, mfd})
        add_common_flags(cmd, cfg, m_range, case_name, lambda, ell00);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        finish_config(cfg, m_range, case_name, lambda, ell00);
        if (generate->parsed()) return fracspec::cmd_generate(cfg);
        if (converge->parsed()) return fracspec::cmd_converge(cfg);
        return fracspec::cmd_mfd_params(cfg);
    } catch (const fracspec::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
