#include "fracspec/manifold.hpp"

#include <algorithm>
#include <cmath>

#include "fracspec/errors.hpp"

namespace fracspec {

namespace {

const SqrtRational kOne{Rational(1)};

void check_ratios(const SqrtRational& lambda, const SqrtRational& eps_ratio) {
    const SqrtRational zero{Rational(0)};
    if (!(zero < lambda) || !(lambda < kOne))
        throw InvalidRatio("longitudinal ratio must lie in (0,1), got " + lambda.to_string());
    if (!(zero < eps_ratio))
        throw InvalidRatio("transversal ratio must be positive, got " + eps_ratio.to_string());
    if (!(eps_ratio < lambda))
        throw InvalidRatio("transversal ratio must be strictly below the longitudinal one (tubes "
                           "must shrink faster than edges), got " +
                           eps_ratio.to_string() + " vs " + lambda.to_string());
}

} // namespace

ManifoldScaling mfd_scaling(const PcfSystem& sys, int d, const SqrtRational& lambda,
                            const SqrtRational& eps_ratio, const SqrtRational& eps0,
                            const SqrtRational& ell00, int m) {
    if (d < 2) throw DomainError("ambient dimension must be at least 2, got " + std::to_string(d));
    check_ratios(lambda, eps_ratio);
    if (!(SqrtRational{Rational(0)} < eps0))
        throw InvalidRatio("transversal base scale must be positive, got " + eps0.to_string());

    ManifoldScaling ms;
    ms.base = scaling_plan(sys, m, lambda, ell00);
    ms.d = d;
    ms.eps0 = eps0;
    ms.eps_ratio = eps_ratio;
    ms.eps_m = eps0 * eps_ratio.pow(m);

    // cross-sections carry volume eps^(d-1); the isometry into the tube
    // rescales by the inverse square root of that volume
    const int codim = d - 1;
    ms.c_sq = ms.base.c_sq * ms.eps_m.pow(-codim);
    ms.eps_rate = GeometricRate{eps0, eps_ratio};
    ms.c_sq_rate = GeometricRate{ms.base.c_sq_rate.mantissa * eps0.pow(-codim),
                                 ms.base.c_sq_rate.ratio * eps_ratio.pow(-codim)};
    return ms;
}

double mfd_delta_sq(const GraphStats& stats, const ManifoldPlan& plan, double ell_min,
                    double vol_min, double vol_max) {
    if (plan.alpha_inf > 0.5)
        throw DomainError("vertex cores too large: alpha_inf > 1/2, no distance bound holds");
    if (!(plan.alpha0 > 0.0)) throw DomainError("alpha0 must be positive");
    if (plan.alpha_inf < plan.alpha0)
        throw DomainError("alpha_inf must dominate alpha0");
    if (!(plan.lambda2_core > 0.0)) throw DomainError("core spectral gap must be positive");
    if (!(plan.kappa > 0.0) || plan.kappa > 1.0)
        throw DomainError("collar fraction must lie in (0,1]");
    if (!(plan.lambda2_tube > 0.0) || plan.lambda2_tube > 2.0)
        throw DomainError("tube spectral constant must lie in (0,2]");
    if (!(ell_min > 0.0)) throw DomainError("shortest edge length must be positive");
    if (!(vol_min > 0.0) || vol_max < vol_min)
        throw DomainError("transversal volume bounds must satisfy 0 < vol_min <= vol_max");

    const double core_term = 2.0 * plan.alpha_inf;
    const double vol_ratio = vol_max / vol_min;
    const double weight_term = 18.0 / (plan.lambda2_tube * plan.alpha0) * stats.c_gamma *
                               vol_ratio * vol_ratio * stats.max_inv_rel_weight;
    const double collar_term =
        plan.kappa + 2.0 / (plan.kappa * ell_min * ell_min * plan.lambda2_core);
    return std::max({core_term, weight_term, collar_term});
}

FractalManifoldRates mfd_frac_delta(const PcfSystem& sys, const SqrtRational& lambda,
                                    const SqrtRational& eps, int m) {
    const SqrtRational zero{Rational(0)};
    if (!(zero < lambda) || !(lambda < kOne))
        throw InvalidRatio("longitudinal ratio must lie in (0,1), got " + lambda.to_string());

    const Rational contraction = sys.r / Rational(sys.N);
    FractalManifoldRates out;
    out.window_lo = SqrtRational(contraction) * lambda;
    out.window_hi = lambda;
    out.eps_star = SqrtRational::sqrt(contraction) * lambda;
    if (!(out.window_lo < eps) || !(eps < out.window_hi))
        throw OutOfWindow("transversal ratio " + eps.to_string() +
                          " outside the open admissible window (" + out.window_lo.to_string() +
                          ", " + out.window_hi.to_string() + ")");

    // each ratio is the per-generation factor of delta^2
    const SqrtRational r1 = eps / lambda;
    const SqrtRational r2 = lambda / eps * SqrtRational(contraction);
    out.delta_sq_transversal = GeometricRate{kOne, r1};
    out.delta_sq_spectral = GeometricRate{kOne, r2};
    out.delta_sq = GeometricRate{kOne, r1 < r2 ? r2 : r1};
    out.balanced = r1 == r2;
    out.m = m;
    out.delta_m = std::sqrt(out.delta_sq.value_at(m));
    return out;
}

double eps_threshold(double ell_min, double C_v) {
    if (!(ell_min > 0.0)) throw DomainError("shortest edge length must be positive");
    if (!(C_v > 0.0))
        throw DomainError("calibration constant must be supplied positive; it has no default");
    return ell_min / (C_v * C_v);
}

std::vector<ManifoldCaseRow> manifold_case_table(const PcfSystem& sys, int d) {
    std::vector<ManifoldCaseRow> rows;
    const std::pair<ScalingCase, const char*> cases[] = {
        {ScalingCase::geometric, "geometric"},
        {ScalingCase::inverse_weight, "inverse-weight"},
        {ScalingCase::unit_tau, "unit-tau"},
    };
    const Rational contraction = sys.r / Rational(sys.N);
    for (const auto& [tag, label] : cases) {
        ScalingPlan plan = scaling_plan(sys, 0, tag);
        ManifoldCaseRow row;
        row.label = label;
        row.lambda = plan.lambda;
        row.window_lo = SqrtRational(contraction) * plan.lambda;
        row.window_hi = plan.lambda;
        row.eps_star = SqrtRational::sqrt(contraction) * plan.lambda;
        row.ell_rate = GeometricRate{plan.ancestor_length[0], plan.lambda};
        row.tau_rate = plan.tau_rate;
        row.c_sq_rate =
            mfd_scaling(sys, d, plan.lambda, row.eps_star, kOne, plan.ell00, 0).c_sq_rate;
        row.delta_sq_rate = GeometricRate{kOne, SqrtRational::sqrt(contraction)};
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace fracspec
