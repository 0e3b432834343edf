#pragma once

#include <utility>
#include <vector>

#include "fracspec/pcf_system.hpp"
#include "fracspec/rational.hpp"
#include "fracspec/weighted_graph.hpp"

namespace fracspec {

/// A combinatorial graph whose edges carry positive lengths. The vertex and
/// edge weights of `graph` are those of the discrete partner (or 1/length
/// and half the incident length for subdivision graphs).
struct MetricGraph {
    WeightedGraph graph;
    std::vector<double> length;

    double ell_min() const;
    double ell_max() const;
    double total_length() const;
};

/// Validates lengths (positive, one per edge; LengthMismatch otherwise).
MetricGraph make_metric(WeightedGraph graph, std::vector<double> length);

enum class ScalingCase { geometric, inverse_weight, unit_tau, custom };

/// The exact rescaling data attached to generation m of a fractal chain:
///   lengths     l_{m,e} = (l00 / gamma0_{e0}) * Lambda^m
///   c_m^2       = 2 / (l00 * C0 * N0 * (N*Lambda)^m)
///   tau_m       = l00^2 * (C0*N0/2) * (N*Lambda^2/r)^m
/// and the identity c_m^2 * tau_m = l_{m,e} * gamma_{m,e} on every edge.
/// Everything is kept in exact arithmetic; to_double conversions happen at
/// the edge of the API.
struct ScalingPlan {
    ScalingCase tag = ScalingCase::custom;
    int m = 0;
    SqrtRational lambda;
    SqrtRational ell00;

    SqrtRational c_sq;  // c_m^2
    SqrtRational tau;   // tau_m
    std::vector<SqrtRational> ancestor_length; // per generation-0 edge

    // whole-sequence descriptions (mantissa * ratio^m)
    GeometricRate c_sq_rate;
    GeometricRate tau_rate;

    double c() const;
    double tau_value() const { return tau.to_double(); }
};

/// Computes the scaling data alone (no graph needed); exact.
/// Throws InvalidRatio unless 0 < Lambda < 1.
ScalingPlan scaling_plan(const PcfSystem& sys, int m, const SqrtRational& lambda,
                         const SqrtRational& ell00, ScalingCase tag = ScalingCase::custom);
ScalingPlan scaling_plan(const PcfSystem& sys, int m, ScalingCase tag);

/// Attaches compatible lengths to a level graph. Case tags choose
/// Lambda/l00 as: geometric (theta, 1), inverse-weight (r, 1, so that
/// l = 1/gamma), unit-tau (sqrt(r/N), sqrt(2/(C0 N0)), so that tau = 1).
std::pair<MetricGraph, ScalingPlan> assign_lengths(const PcfSystem& sys, const LevelGraph& level,
                                                   ScalingCase tag);
std::pair<MetricGraph, ScalingPlan> assign_lengths(const PcfSystem& sys, const LevelGraph& level,
                                                   const SqrtRational& lambda,
                                                   const SqrtRational& ell00,
                                                   ScalingCase tag = ScalingCase::custom);

/// Refinement of a metric graph by degree-2 vertices (spectrally
/// transparent) together with its discrete shadow: vertex weight
/// mu(v) = half the total incident length, conductance gamma = 1/length,
/// which makes the pair compatible with c = 1, tau = 1.
struct Subdivision {
    MetricGraph metric;
    WeightedGraph discrete;
};

/// parts[e] >= 1 equal pieces per edge; BadPartition otherwise.
Subdivision subdivide(const MetricGraph& mg, const std::vector<int>& parts);
Subdivision subdivide(const MetricGraph& mg, int parts_every_edge);

} // namespace fracspec
