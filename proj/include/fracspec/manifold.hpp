#pragma once

#include <string>
#include <vector>

#include "fracspec/metric_graph.hpp"
#include "fracspec/pcf_system.hpp"
#include "fracspec/rational.hpp"
#include "fracspec/weighted_graph.hpp"

namespace fracspec {

/// Geometric data of a tubular neighbourhood build around a metric graph:
/// edges become tubes of cross-section eps^2 * Y_e, vertices become small
/// core pieces eps * X_v. Everything here is a closed-form parameter; no
/// surface is meshed and no PDE on the thickened domain is solved.
///
/// The spectral constants (alpha bounds, lambda2 of the unscaled core,
/// the tube spectral constant) describe the chosen cross-section/core
/// geometry; they are inputs, not computed quantities.
struct ManifoldPlan {
    int d = 2;                  // ambient dimension, >= 2
    double vol_Y = 1.0;         // transversal volume (normalised default)
    double kappa = 0.5;         // collar fraction of the edge claimed by the vertex, in (0,1]
    double vol_core_min = 1.0;  // bounds on vol(X_v) of the unscaled cores
    double vol_core_max = 1.0;
    double lambda2_core = 1.0;  // inf over vertices of lambda_2(X_v), unscaled
    double lambda2_tube = 1.0;  // constant in the lower bound lambda2 >= const/ell_max^2, in (0, 2]
    double alpha0 = 0.5;        // bounds on alpha(v) = 2 vol(core_v) / vol(edge neighbourhoods at v)
    double alpha_inf = 0.5;     // alpha_inf <= 1/2 required for any estimate to hold
};

/// Tube-parameter scaling along a fractal approximation chain. Extends the
/// metric-graph scaling by the transversal scale eps_m = eps0 * E^m, which
/// must shrink strictly faster than the edge lengths (E < Lambda). The
/// isometric rescaling constant picks up a factor eps_m^{-(d-1)/2} (the
/// cross-sections carry volume eps_m^{d-1}); the energy renormalisation tau
/// is untouched.
struct ManifoldScaling {
    ScalingPlan base;  // longitudinal part: lengths, tau (identical to the metric-graph chain)
    int d = 2;

    SqrtRational eps0{Rational(1)};
    SqrtRational eps_ratio;  // E, per-generation transversal shrink factor
    SqrtRational eps_m;      // eps0 * E^m, exact

    SqrtRational c_sq;       // base.c_sq * eps_m^{-(d-1)}
    GeometricRate eps_rate;  // m |-> eps0 * E^m
    GeometricRate c_sq_rate; // m |-> c_m^2 for the whole sequence

    double c() const { return std::sqrt(c_sq.to_double()); }
    double tau_value() const { return base.tau_value(); }
};

/// Computes the tube parameters for generation m. Exact arithmetic
/// throughout; the metric-graph part is scaling_plan(sys, m, lambda, ell00).
/// Throws InvalidRatio unless 0 < E < Lambda < 1 (the equal-ratio case
/// E = Lambda, i.e. applying the similitudes to a fixed thickened
/// neighbourhood, is rejected: the tubes would not shrink fast enough
/// relative to the edges). Throws DomainError for d < 2.
ManifoldScaling mfd_scaling(const PcfSystem& sys, int d, const SqrtRational& lambda,
                            const SqrtRational& eps_ratio, const SqrtRational& eps0,
                            const SqrtRational& ell00, int m);

/// Squared distance bound for a weighted graph against a compatible
/// graph-like manifold:
///
///   delta^2 = max{ 2 alpha_inf,
///                  (18 / (lambda2_tube * alpha0)) * (gamma_max/gamma_min)
///                      * (vol_max/vol_min)^2 * (mu_max/gamma_min),
///                  kappa + 2 / (kappa * ell_min^2 * lambda2_core) }
///
/// vol_min/vol_max bound the transversal volumes actually used. Throws
/// DomainError when alpha_inf > 1/2 (no estimate holds), alpha0 <= 0,
/// lambda2_core <= 0, kappa outside (0,1], lambda2_tube outside (0,2], or
/// non-positive ell_min / volumes.
double mfd_delta_sq(const GraphStats& stats, const ManifoldPlan& plan, double ell_min,
                    double vol_min, double vol_max);

/// Error rates for the full chain "fractal generation m vs. its tubular
/// neighbourhood". Two competing geometric rates: the transversal scale
/// must shrink against the edge length (ratio E/Lambda per generation in
/// delta^2), while the spectral gap of the discrete generations demands the
/// opposite (ratio (Lambda/E) * r/N). The admissible window for E is the
/// open interval ((r/N) Lambda, Lambda); its geometric mean
/// E* = sqrt(r/N) * Lambda balances the two rates.
///
/// All rates are per-generation ratios of delta^2 (kept squared so they stay
/// inside exact sqrt-rational arithmetic); multiplicative constants are not
/// tracked — mantissas are normalised to 1.
struct FractalManifoldRates {
    SqrtRational window_lo;  // (r/N) * Lambda, excluded
    SqrtRational window_hi;  // Lambda, excluded
    SqrtRational eps_star;   // sqrt(r/N) * Lambda

    GeometricRate delta_sq_transversal;  // ratio E / Lambda
    GeometricRate delta_sq_spectral;     // ratio (Lambda/E) * (r/N)
    GeometricRate delta_sq;              // the larger of the two
    bool balanced = false;               // both ratios equal (E = E*)

    int m = 0;
    double delta_m = 1.0;  // sqrt(delta_sq at m); constant factor unconstrained

    double delta_at(int mm) const { return std::sqrt(delta_sq.value_at(mm)); }
};

/// Throws OutOfWindow unless (r/N) Lambda < E < Lambda (open interval;
/// both endpoints rejected), InvalidRatio unless 0 < Lambda < 1.
FractalManifoldRates mfd_frac_delta(const PcfSystem& sys, const SqrtRational& lambda,
                                    const SqrtRational& eps, int m);

/// Largest admissible transversal base scale eps0 = ell_min / C_v^2 for
/// which the tube spectral bound holds with constant 1. C_v captures the
/// length variation and the cross-section/core spectral data; it has no
/// universal value and must be supplied (e.g. from a calibration run).
/// Throws DomainError for non-positive inputs.
double eps_threshold(double ell_min, double C_v);

/// One row of the parameter table for a preset scaling case applied to a
/// fractal chain: the longitudinal ratio, the admissible transversal
/// window, the balanced optimum, and the resulting rates.
struct ManifoldCaseRow {
    std::string label;       // "geometric", "inverse-weight", "unit-tau"
    SqrtRational lambda;     // longitudinal ratio
    SqrtRational window_lo;  // admissible transversal ratios (open interval)
    SqrtRational window_hi;
    SqrtRational eps_star;        // balanced choice
    GeometricRate ell_rate;       // edge lengths (mantissa from the first ancestor edge)
    GeometricRate tau_rate;       // energy renormalisation (same as metric graph)
    GeometricRate c_sq_rate;      // isometric rescaling at E = E*, given d, eps0 = 1
    GeometricRate delta_sq_rate;  // error rate at E = E* (ratio sqrt(r/N))
};

/// The three preset rows (geometric / inverse-weight / unit-tau) for one
/// system. Exact; d enters only the c^2 column.
std::vector<ManifoldCaseRow> manifold_case_table(const PcfSystem& sys, int d = 2);

} // namespace fracspec
