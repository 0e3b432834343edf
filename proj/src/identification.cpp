#include "fracspec/identification.hpp"

#include <cmath>
#include <string>

#include "fracspec/errors.hpp"

namespace fracspec {

IdentificationPair build_identification(const WeightedGraph& g, const FemDiscretization& fem,
                                        double c, double tau) {
    const int n = g.n();
    if (fem.n_vertex != n)
        throw DimensionMismatch("graph has " + std::to_string(n) + " vertices but the mesh has " +
                                std::to_string(fem.n_vertex));
    if (!(c > 0.0) || !(tau > 0.0))
        throw DimensionMismatch("rescaling factors must be positive");

    IdentificationPair pair;
    pair.c = c;
    pair.tau = tau;
    pair.psi = harmonic_partition(fem);
    pair.nu = vertex_measure(fem, pair.psi);

    // nu(v) = sum_w <psi_v, psi_w>: with sum_w psi_w = 1 this is the
    // integral of psi_v again; a failure means the partition is broken.
    Eigen::MatrixXd gram = Eigen::MatrixXd(pair.psi.transpose() * fem.B * pair.psi);
    for (int v = 0; v < n; ++v) {
        const double row = gram.row(v).sum();
        if (std::abs(row - pair.nu(v)) > 1e-12 * std::max(1.0, std::abs(pair.nu(v))))
            throw NumericalError("partition identity violated at vertex " + g.vertices[v]);
    }

    // nu(v) / mu(v) must be the same constant 1/c^2 at every vertex;
    // otherwise the discretization map is not the adjoint of the smoothing
    // map and the pair does not qualify.
    double ratio0 = pair.nu(0) / g.mu[0];
    for (int v = 0; v < n; ++v) {
        const double ratio = pair.nu(v) / g.mu[v];
        if (std::abs(ratio - ratio0) > 1e-10 * std::abs(ratio0))
            throw IncompatibleWeights("nu/mu varies across vertices: " + std::to_string(ratio0) +
                                      " vs " + std::to_string(ratio) + " at " + g.vertices[v]);
    }

    pair.J = c * pair.psi;

    // J applied to the constant vector returns c times the constant function
    Eigen::VectorXd j_one = pair.J * Eigen::VectorXd::Ones(n);
    if ((j_one.array() - c).abs().maxCoeff() > 1e-12 * c)
        throw NumericalError("smoothing map does not preserve constants");

    Eigen::SparseMatrix<double> psiTB = pair.psi.transpose() * fem.B;
    Eigen::VectorXd inv_cnu = (c * pair.nu.array()).inverse();
    pair.Jp = inv_cnu.asDiagonal() * psiTB;

    // vertex-value extraction: the graph vertices are the first n DOFs
    Eigen::SparseMatrix<double> extract(n, fem.dof);
    extract.reserve(Eigen::VectorXi::Constant(fem.dof, 1));
    for (int v = 0; v < n; ++v) extract.insert(v, v) = 1.0 / c;
    extract.makeCompressed();
    pair.J1p = extract;

    return pair;
}

IdentificationPair build_identification(const LevelGraph& level, const MetricGraph& mg,
                                        const FemDiscretization& fem, const ScalingPlan& plan) {
    if (mg.graph.n() != level.graph.n())
        throw DimensionMismatch("metric graph does not match the level graph");
    return build_identification(level.graph, fem, plan.c(), plan.tau_value());
}

IdentificationPair build_identification(const Subdivision& sub, const FemDiscretization& fem) {
    return build_identification(sub.discrete, fem, 1.0, 1.0);
}

} // namespace fracspec
