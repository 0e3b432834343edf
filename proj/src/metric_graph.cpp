#include "fracspec/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fracspec/errors.hpp"

namespace fracspec {

double MetricGraph::ell_min() const {
    return *std::min_element(length.begin(), length.end());
}

double MetricGraph::ell_max() const {
    return *std::max_element(length.begin(), length.end());
}

double MetricGraph::total_length() const {
    return std::accumulate(length.begin(), length.end(), 0.0);
}

MetricGraph make_metric(WeightedGraph graph, std::vector<double> length) {
    if (graph.edges.size() != length.size())
        throw LengthMismatch("need exactly one length per edge");
    for (double l : length)
        if (!(l > 0.0)) throw LengthMismatch("edge lengths must be positive");
    return MetricGraph{std::move(graph), std::move(length)};
}

double ScalingPlan::c() const { return std::sqrt(c_sq.to_double()); }

ScalingPlan scaling_plan(const PcfSystem& sys, int m, const SqrtRational& lambda,
                         const SqrtRational& ell00, ScalingCase tag) {
    if (!(SqrtRational(Rational(0)) < lambda && lambda < SqrtRational(Rational(1))))
        throw InvalidRatio("length decay ratio must lie strictly between 0 and 1, got " +
                           lambda.to_string());
    if (!(SqrtRational(Rational(0)) < ell00))
        throw InvalidRatio("base length must be positive");
    if (m < 0) throw ConfigError("generation must be nonnegative");

    ScalingPlan plan;
    plan.tag = tag;
    plan.m = m;
    plan.lambda = lambda;
    plan.ell00 = ell00;

    const Rational c0n0 = sys.C0 * Rational(sys.N0);
    plan.c_sq_rate.mantissa = SqrtRational(Rational(2)) / (ell00 * SqrtRational(c0n0));
    plan.c_sq_rate.ratio = SqrtRational(Rational(1)) / (SqrtRational(Rational(sys.N)) * lambda);
    plan.tau_rate.mantissa = ell00 * ell00 * SqrtRational(c0n0 / Rational(2));
    plan.tau_rate.ratio = SqrtRational(Rational(sys.N)) * lambda * lambda / SqrtRational(sys.r);

    plan.c_sq = plan.c_sq_rate.exact_at(m);
    plan.tau = plan.tau_rate.exact_at(m);

    const SqrtRational lam_m = lambda.pow(m);
    plan.ancestor_length.reserve(sys.gamma0.size());
    for (const auto& g0 : sys.gamma0)
        plan.ancestor_length.push_back(ell00 / SqrtRational(g0) * lam_m);
    return plan;
}

ScalingPlan scaling_plan(const PcfSystem& sys, int m, ScalingCase tag) {
    switch (tag) {
    case ScalingCase::geometric:
        return scaling_plan(sys, m, SqrtRational(sys.theta), SqrtRational(Rational(1)), tag);
    case ScalingCase::inverse_weight:
        return scaling_plan(sys, m, SqrtRational(sys.r), SqrtRational(Rational(1)), tag);
    case ScalingCase::unit_tau:
        return scaling_plan(sys, m, SqrtRational::sqrt(sys.r / Rational(sys.N)),
                            SqrtRational::sqrt(Rational(2) / (sys.C0 * Rational(sys.N0))), tag);
    case ScalingCase::custom:
        throw ConfigError("custom scaling needs explicit Lambda and l00");
    }
    throw ConfigError("unknown scaling case");
}

std::pair<MetricGraph, ScalingPlan> assign_lengths(const PcfSystem& sys, const LevelGraph& level,
                                                   const SqrtRational& lambda,
                                                   const SqrtRational& ell00, ScalingCase tag) {
    ScalingPlan plan = scaling_plan(sys, level.m, lambda, ell00, tag);
    std::vector<double> length(level.graph.edges.size());
    for (size_t e = 0; e < length.size(); ++e)
        length[e] = plan.ancestor_length[level.ancestor[e]].to_double();
    MetricGraph mg = make_metric(level.graph, std::move(length));

    // the edge identity gamma_e * ell_e = c^2 tau must close to near machine precision
    const double target = plan.c_sq.to_double() * plan.tau.to_double();
    for (size_t e = 0; e < mg.length.size(); ++e) {
        const double lhs = mg.length[e] * mg.graph.edges[e].gamma;
        if (std::abs(lhs - target) > 1e-12 * std::max(1.0, std::abs(target)))
            throw NumericalError("length/weight compatibility drifted beyond 1e-12");
    }
    return {std::move(mg), std::move(plan)};
}

std::pair<MetricGraph, ScalingPlan> assign_lengths(const PcfSystem& sys, const LevelGraph& level,
                                                   ScalingCase tag) {
    ScalingPlan plan = scaling_plan(sys, level.m, tag);
    return assign_lengths(sys, level, plan.lambda, plan.ell00, tag);
}

Subdivision subdivide(const MetricGraph& mg, const std::vector<int>& parts) {
    if (parts.size() != mg.length.size())
        throw BadPartition("need one part count per edge");
    for (int p : parts)
        if (p < 1) throw BadPartition("part counts must be at least 1");

    std::vector<std::string> ids = mg.graph.vertices;
    std::vector<WeightedGraph::Edge> edges;
    std::vector<double> lengths;
    for (size_t e = 0; e < mg.graph.edges.size(); ++e) {
        const auto& orig = mg.graph.edges[e];
        const double sub_len = mg.length[e] / parts[e];
        int prev = orig.u;
        for (int k = 1; k < parts[e]; ++k) {
            const int mid = static_cast<int>(ids.size());
            ids.push_back("s" + std::to_string(e) + "_" + std::to_string(k));
            edges.push_back({prev, mid, 1.0 / sub_len});
            lengths.push_back(sub_len);
            prev = mid;
        }
        edges.push_back({prev, orig.v, 1.0 / sub_len});
        lengths.push_back(sub_len);
    }

    // mu(v) = half the incident length; gamma = 1/length (set above)
    std::vector<double> mu(ids.size(), 0.0);
    for (size_t e = 0; e < edges.size(); ++e) {
        mu[edges[e].u] += 0.5 * lengths[e];
        mu[edges[e].v] += 0.5 * lengths[e];
    }
    WeightedGraph discrete = build_graph_indexed(std::move(ids), std::move(edges), std::move(mu));
    MetricGraph metric = make_metric(discrete, std::move(lengths));
    return {std::move(metric), std::move(discrete)};
}

Subdivision subdivide(const MetricGraph& mg, int parts_every_edge) {
    return subdivide(mg, std::vector<int>(mg.length.size(), parts_every_edge));
}

} // namespace fracspec
