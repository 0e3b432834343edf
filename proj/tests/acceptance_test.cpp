// Integration gate: ten end-to-end checks of the whole pipeline with pinned
// tolerances. Prints one PASS/FAIL line per check and exits nonzero if any
// fails. Run via ctest (registered as "acceptance") or directly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fracspec/errors.hpp"
#include "fracspec/fem.hpp"
#include "fracspec/identification.hpp"
#include "fracspec/manifold.hpp"
#include "fracspec/metric_graph.hpp"
#include "fracspec/pcf_system.hpp"
#include "fracspec/que_report.hpp"
#include "fracspec/weighted_graph.hpp"
#include "support/oracles.hpp"

using namespace fracspec;

namespace {

// ---- pinned tolerances ----------------------------------------------------
constexpr double kSpectrumRelTol = 1e-9;   // discrete chain vs closed form
constexpr double kMeshRatioLo = 3.0;       // O(h^2): error ratio per mesh halving
constexpr double kMeshRatioHi = 5.0;
constexpr double kFemErrorFraction = 0.10; // mesh-fineness precondition for the bound check
constexpr double kRateCap = 0.6;           // fitted eigenvalue-difference decay per generation
constexpr double kEquilateralTol = 1e-6;   // Richardson-extrapolated vs closed form
constexpr double kStarMarginTol = 1e-11;   // numerical slack on provably >= 0 margins
constexpr double kSubdivRatioLo = 3.6;     // lambda_1 error decay per subdivision halving
constexpr double kSubdivRatioHi = 4.4;
constexpr double kSurdTol = 1e-15;         // balanced transversal ratio as a double
constexpr double kCompatRelTol = 1e-12;    // compatibility identities
constexpr double kExactRelTol = 1e-12;     // closed-form cross-checks
constexpr double kTime1 = 30.0, kTime3 = 300.0, kTime5 = 60.0; // runtime budgets, seconds

struct Gate {
    int failures = 0;

    void run(int index, const char* title, const std::function<std::string()>& body) {
        std::string detail;
        bool ok = true;
        try {
            detail = body();
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        if (!detail.empty() && detail.rfind("FAIL", 0) == 0) ok = false;
        std::printf("%s criterion %d (%s)%s%s\n", ok ? "PASS" : "FAIL", index, title,
                    detail.empty() ? "" : ": ", detail.c_str());
        if (!ok) ++failures;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fail(const std::string& why) { return "FAIL — " + why; }

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

/// Least-squares geometric ratio of y over integer positions m.
double fitted_ratio(const std::vector<int>& ms, const std::vector<double>& ys) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < ms.size(); ++i) {
        mx += ms[i];
        my += std::log(ys[i]);
    }
    mx /= ms.size();
    my /= ms.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < ms.size(); ++i) {
        const double dx = ms[i] - mx;
        sxy += dx * (std::log(ys[i]) - my);
        sxx += dx * dx;
    }
    return std::exp(sxy / sxx);
}

// ---- criterion bodies (each returns a detail string, "FAIL — ..." on failure)

std::string criterion1_interval_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    auto sys = preset("interval");
    double worst_rel = 0.0, worst_ratio_lo = 1e300, worst_ratio_hi = 0.0;

    for (int m = 1; m <= 8; ++m) {
        auto level = level_graph(sys, m);
        auto lam = spectrum(level.graph);
        auto want = oracles::interval_level_spectrum(m);
        if (lam.size() != want.size()) return fail("spectrum size mismatch at m=" + std::to_string(m));
        for (size_t k = 0; k < lam.size(); ++k) {
            const double rel = std::abs(lam[k] - want[k]) / std::max(1.0, want[k]);
            worst_rel = std::max(worst_rel, rel);
            if (rel > kSpectrumRelTol)
                return fail(fmt("discrete m=%.0f k=%.0f relative error %.3g", m, double(k), rel));
        }

        auto [mg, plan] = assign_lengths(sys, level, ScalingCase::geometric);
        if (!(plan.tau == SqrtRational(Rational(1))))
            return fail("interval geometric chain should have tau = 1 exactly");
        const bool iterative = 10 * (1 << m) + 1 > 600;
        auto coarse = kirchhoff_spectrum(fem_discretize(mg, 4), 4, iterative);
        auto fine = kirchhoff_spectrum(fem_discretize(mg, 9), 4, iterative);
        const double h_f = mg.ell_max() / 10.0;
        for (int k = 1; k <= 3; ++k) {
            const double exact = oracles::neumann_interval_eigenvalue(k);
            const double ec = coarse[k] - exact, ef = fine[k] - exact;
            if (ec <= 0 || ef <= 0)
                return fail(fmt("conforming eigenvalues should overshoot (m=%.0f k=%.0f)",
                                m, k));
            if (ef > 0.5 * exact * exact * h_f * h_f)
                return fail(fmt("metric m=%.0f k=%.0f error %.3g not O(h^2)", m, k, ef));
            const double ratio = ec / ef;
            worst_ratio_lo = std::min(worst_ratio_lo, ratio);
            worst_ratio_hi = std::max(worst_ratio_hi, ratio);
            if (ratio < kMeshRatioLo || ratio > kMeshRatioHi)
                return fail(fmt("halving ratio %.3g outside [3,5] (m=%.0f k=%.0f)", ratio, m, k));
        }
    }
    const double dt = seconds_since(t0);
    if (dt > kTime1) return fail(fmt("took %.1f s > 30 s", dt));
    return fmt("worst rel %.2g, halving ratios [%.2f, %.2f]", worst_rel, worst_ratio_lo,
               worst_ratio_hi) + fmt(", %.1f s", dt);
}

std::string criterion2_energy_rescaling() {
    auto sys = preset("sierpinski");
    for (int m = 0; m <= 12; ++m) {
        auto level = level_graph(sys, m);
        auto [mg, plan] = assign_lengths(sys, level, SqrtRational(Rational(1, 2)),
                                          SqrtRational(Rational(1)));
        const SqrtRational want{Rational(3) * Rational(5, 4).pow(m)};
        if (!(plan.tau == want))
            return fail("tau at m=" + std::to_string(m) + " is " + plan.tau.to_string() +
                        ", want " + want.to_string());
    }
    return "tau = 3*(5/4)^m exact through m=12 (largest graph: 797163 vertices)";
}

struct ChainReports {
    std::vector<QueReport> reports; // m = 1..4
};

ChainReports measure_sierpinski_chain() {
    ChainReports out;
    auto sys = preset("sierpinski");
    for (int m = 1; m <= 4; ++m) {
        auto level = level_graph(sys, m);
        auto [mg, plan] = assign_lengths(sys, level, ScalingCase::geometric);
        out.reports.push_back(measure_with_refinement(level, mg, plan, 2, 5));
    }
    return out;
}

std::string criterion3_defect_bounds(const ChainReports& chain, double dt) {
    for (int m = 1; m <= 4; ++m) {
        const auto& r = chain.reports[m - 1];
        const double delta = std::sqrt((4.0 / 3.0) * std::pow(0.2, m));
        if (std::abs(r.delta_theory - delta) > kExactRelTol * delta)
            return fail("pipeline delta_theory deviates from sqrt((4/3)/5^m)");

        struct Named {
            const char* name;
            double value, fem_err;
        };
        const Named defects[] = {
            {"adjoint", r.measured.adjointDefect, r.fem_error.adjointDefect},
            {"jpj", r.measured.jpj, r.fem_error.jpj},
            {"jjp", r.measured.jjp, r.fem_error.jjp},
            {"form", r.measured.formCloseness, r.fem_error.formCloseness},
            {"op/4", r.measured.opDefect / 4.0, r.fem_error.opDefect / 4.0},
        };
        for (const auto& d : defects) {
            if (d.fem_err >= kFemErrorFraction * delta)
                return fail(fmt("mesh too coarse at m=%.0f: fem error %.3g vs delta %.3g", m,
                                d.fem_err, delta));
            if (d.value > delta + d.fem_err)
                return fail(std::string(d.name) +
                            fmt(" defect %.4g exceeds delta %.4g at m=%.0f", d.value, delta, m));
        }
    }
    if (dt > kTime3) return fail(fmt("took %.1f s > 300 s", dt));
    const auto& r4 = chain.reports[3];
    return fmt("m=4: jpj %.3g, jjp %.3g vs delta %.3g", r4.measured.jpj, r4.measured.jjp,
               r4.delta_theory) + fmt("; %.1f s", dt);
}

std::string criterion4_eigenvalue_rate(const ChainReports& chain) {
    const std::vector<int> ms{1, 2, 3, 4};
    std::string rates;
    for (int k = 2; k <= 5; ++k) {
        std::vector<double> diffs;
        for (const auto& r : chain.reports) {
            if (static_cast<int>(r.eigenvalues.size()) < k)
                return fail("eigenvalue table shorter than k=5");
            diffs.push_back(r.eigenvalues[k - 1].diff);
            if (diffs.back() <= 0) return fail("expected strictly positive eigenvalue gaps");
        }
        const double ratio = fitted_ratio(ms, diffs);
        if (ratio > kRateCap) return fail(fmt("k=%.0f fitted ratio %.3g > 0.6", k, ratio));
        rates += fmt("%.2g ", ratio);
    }
    return "fitted ratios per k=2..5: " + rates + "(cap 0.6)";
}

std::string criterion5_star_bound() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(20250816u);
    std::uniform_int_distribution<int> deg(2, 6);
    std::uniform_real_distribution<double> len(0.5, 1.5);
    double worst_weighted = 1e300, worst_gap = 1e300;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> lengths(deg(rng));
        double ell_max = 0.0;
        for (auto& l : lengths) {
            l = len(rng);
            ell_max = std::max(ell_max, l);
        }
        const auto r = weighted_star_lambda2(lengths, 8);
        worst_weighted = std::min(worst_weighted, r.weighted - r.unweighted);
        worst_gap = std::min(worst_gap, r.unweighted - 2.0 / (ell_max * ell_max));
        if (r.weighted < r.unweighted - kStarMarginTol)
            return fail(fmt("weighted %.6g < unweighted %.6g", r.weighted, r.unweighted));
        if (r.unweighted < 2.0 / (ell_max * ell_max) - kStarMarginTol)
            return fail(fmt("unweighted %.6g < 2/ell_max^2 %.6g at trial %.0f", r.unweighted,
                            2.0 / (ell_max * ell_max), trial));
    }
    const auto eq = weighted_star_lambda2({1.0, 1.0, 1.0}, 24);
    const double want = oracles::equilateral_star3_lambda2();
    if (std::abs(eq.unweighted_extrapolated - want) > kEquilateralTol)
        return fail(fmt("equilateral star lambda2 %.9g vs pi^2/4 %.9g",
                        eq.unweighted_extrapolated, want));
    const double dt = seconds_since(t0);
    if (dt > kTime5) return fail(fmt("took %.1f s > 60 s", dt));
    return fmt("200 stars, worst margins %.3g / %.3g", worst_weighted, worst_gap) +
           fmt(", equilateral |err| %.2g", std::abs(eq.unweighted_extrapolated - want));
}

std::string criterion6_triangle_oracle() {
    auto g = build_graph({"a", "b", "c"}, {{"a", "b", 1.0}, {"b", "c", 1.0}, {"a", "c", 1.0}},
                         {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}});
    auto mg = make_metric(g, {1.0, 1.0, 1.0});
    auto rich = kirchhoff_spectrum_richardson(mg, 128, 6);
    // {k^2 : 1 - cos k in {0, 3/2}}: k in (2 pi / 3) Z, double except 0
    std::vector<double> want{0.0};
    for (int j = 1; want.size() < rich.extrapolated.size(); ++j) {
        const double k = 2.0 * oracles::kPi * j / 3.0;
        want.push_back(k * k);
        if (want.size() < rich.extrapolated.size()) want.push_back(k * k);
    }
    double worst = 0.0;
    for (size_t i = 0; i < rich.extrapolated.size(); ++i)
        worst = std::max(worst, std::abs(rich.extrapolated[i] - want[i]));
    if (worst > kEquilateralTol) return fail(fmt("worst |error| %.3g > 1e-6", worst));
    return fmt("6 eigenvalues, worst |error| %.2g", worst);
}

std::string criterion7_subdivision() {
    auto g = build_graph({"a", "b"}, {{"a", "b", 1.0}}, {{"a", 0.5}, {"b", 0.5}});
    auto unit = make_metric(g, {1.0});
    std::vector<double> errors;
    std::string margins;
    for (int n : {4, 8, 16, 32}) {
        auto sub = subdivide(unit, n);
        auto lam = spectrum(sub.discrete);
        const double err = oracles::neumann_interval_eigenvalue(1) - lam[1];
        if (err <= 0) return fail("discrete lambda_1 should undershoot pi^2");
        errors.push_back(err);

        auto s = stats(sub.discrete);
        const double bound =
            std::sqrt(s.d_max * std::pow(sub.metric.ell_max(), 3) / sub.metric.ell_min());
        if (std::abs(bound - delta_metric_graph(s)) > kExactRelTol * bound)
            return fail("closed-form bound disagrees with the pipeline value");
        auto rep = measure_with_refinement(sub, 2, 3);
        const double defects[] = {rep.measured.adjointDefect, rep.measured.jpj,
                                  rep.measured.jjp,           rep.measured.formCloseness,
                                  rep.measured.opDefect / 4.0};
        for (double d : defects)
            if (d > bound)
                return fail(fmt("measured defect %.4g above sqrt(d l^3 / l0) = %.4g at n=%.0f",
                                d, bound, n));
        margins += fmt("%.2g ", bound - std::max({defects[0], defects[1], defects[2],
                                                  defects[3], defects[4]}));
    }
    for (size_t i = 0; i + 1 < errors.size(); ++i) {
        const double ratio = errors[i] / errors[i + 1];
        if (ratio < kSubdivRatioLo || ratio > kSubdivRatioHi)
            return fail(fmt("lambda_1 error ratio %.3g not ~4 at halving %.0f", ratio, i));
    }
    return "error ratios ~4, defect margins " + margins;
}

std::string criterion8_manifold_tables() {
    auto rows = manifold_case_table(preset("sierpinski"), 2);
    if (rows.size() != 3) return fail("expected three scaling cases");

    const SqrtRational windows[3][2] = {
        {SqrtRational(Rational(1, 10)), SqrtRational(Rational(1, 2))},
        {SqrtRational(Rational(3, 25)), SqrtRational(Rational(3, 5))},
        {SqrtRational(Rational(1, 25), Rational(5)), SqrtRational(Rational(1, 5), Rational(5))},
    };
    const SqrtRational tau_ratios[3] = {SqrtRational(Rational(5, 4)), SqrtRational(Rational(9, 5)),
                                        SqrtRational(Rational(1))};
    const SqrtRational eps_stars[3] = {SqrtRational(Rational(1, 10), Rational(5)),
                                       SqrtRational(Rational(3, 25), Rational(5)),
                                       SqrtRational(Rational(1, 5))};
    for (int i = 0; i < 3; ++i) {
        if (!(rows[i].window_lo == windows[i][0]) || !(rows[i].window_hi == windows[i][1]))
            return fail("window mismatch in case " + rows[i].label);
        if (!(rows[i].tau_rate.ratio == tau_ratios[i]))
            return fail("tau rate mismatch in case " + rows[i].label);
        if (!(rows[i].eps_star == eps_stars[i]))
            return fail("balanced transversal ratio mismatch in case " + rows[i].label);
    }
    const double surd = 1.0 / (2.0 * std::sqrt(5.0));
    if (std::abs(rows[0].eps_star.to_double() - surd) > kSurdTol)
        return fail(fmt("eps* as double off by %.3g", std::abs(rows[0].eps_star.to_double() - surd)));
    return "windows, tau rates, and balanced ratios all exactly equal";
}

std::string criterion9_transitivity_arithmetic() {
    if (compose_delta(0.01, 0.02) != 1.08) return fail("22*0.01 + 43*0.02 should be exactly 1.08");
    if (!(compose_delta(Rational(1, 100), Rational(1, 50)) == Rational(27, 25)))
        return fail("rational composition should give 27/25");
    for (double d : {0.0, 1e-3, 0.1, 0.25})
        if (form_to_op(d) != 4.0 * d) return fail("operator defect should be exactly 4 delta");
    return "compose(0.01, 0.02) = 1.08 and 27/25; form->op = 4 delta exactly";
}

std::string criterion10_compatibility() {
    double worst = 0.0;
    for (const char* name : {"interval", "sierpinski"}) {
        auto sys = preset(name);
        for (ScalingCase tag :
             {ScalingCase::geometric, ScalingCase::inverse_weight, ScalingCase::unit_tau}) {
            for (int m = 0; m <= 4; ++m) {
                auto level = level_graph(sys, m);
                auto [mg, plan] = assign_lengths(sys, level, tag);
                const auto& g = mg.graph;

                // vertex identity: half the incident length over the weight,
                // the same number 1/c^2 at every vertex
                const double c_sq = plan.c_sq.to_double();
                for (int v = 0; v < g.n(); ++v) {
                    double nu = 0.0;
                    for (int e : g.incident[v]) nu += 0.5 * mg.length[e];
                    const double rel = std::abs(nu / g.mu[v] - 1.0 / c_sq) * c_sq;
                    worst = std::max(worst, rel);
                    if (rel > kCompatRelTol)
                        return fail(fmt("vertex identity off by %.3g (m=%.0f)", rel, m));
                }

                // edge identity: gamma * length = c^2 tau
                const double ct = c_sq * plan.tau_value();
                for (size_t e = 0; e < g.edges.size(); ++e) {
                    const double rel = std::abs(g.edges[e].gamma * mg.length[e] - ct) / ct;
                    worst = std::max(worst, rel);
                    if (rel > kCompatRelTol)
                        return fail(fmt("edge identity off by %.3g (m=%.0f)", rel, m));
                }
            }
        }
    }
    return fmt("2 systems x 3 cases x m=0..4, worst relative deviation %.2g", worst);
}

} // namespace

int main() {
    Gate gate;

    gate.run(1, "interval chain exactness and O(h^2) metric convergence",
             criterion1_interval_exactness);
    gate.run(2, "energy rescaling factor exact through m=12", criterion2_energy_rescaling);

    ChainReports chain;
    const auto t3 = std::chrono::steady_clock::now();
    std::string chain_error;
    try {
        chain = measure_sierpinski_chain();
    } catch (const std::exception& e) {
        chain_error = e.what();
    }
    const double chain_dt = seconds_since(t3);
    if (!chain_error.empty()) {
        std::printf("FAIL criterion 3 (measured defects within closed-form bound): exception: %s\n",
                    chain_error.c_str());
        std::printf("FAIL criterion 4 (eigenvalue convergence rate): no measurements\n");
        gate.failures += 2;
    } else {
        gate.run(3, "measured defects within closed-form bound",
                 [&] { return criterion3_defect_bounds(chain, chain_dt); });
        gate.run(4, "eigenvalue convergence rate", [&] { return criterion4_eigenvalue_rate(chain); });
    }

    gate.run(5, "weighted-star second eigenvalue bound", criterion5_star_bound);
    gate.run(6, "equilateral triangle spectrum oracle", criterion6_triangle_oracle);
    gate.run(7, "subdivision convergence and defect bound", criterion7_subdivision);
    gate.run(8, "tube-parameter tables exact", criterion8_manifold_tables);
    gate.run(9, "transitivity and form-to-operator arithmetic",
             criterion9_transitivity_arithmetic);
    gate.run(10, "compatibility identities on all generated pairs", criterion10_compatibility);

    if (gate.failures > 0) {
        std::printf("%d of 10 criteria FAILED\n", gate.failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
