#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fracspec/metric_graph.hpp"

namespace fracspec {

/// Conforming P1 discretization of a metric graph. DOF layout: the graph
/// vertices first (continuity across edges is automatic by sharing them),
/// then one run of equally spaced interior nodes per edge. A assembles
/// the integral of u'v', B the integral of uv (consistent mass).
struct FemDiscretization {
    int n_vertex = 0;
    int dof = 0;
    std::vector<int> interior_start; // per edge
    std::vector<int> interior_count; // per edge
    std::vector<double> seg_h;       // per edge: length / (count + 1)
    std::vector<WeightedGraph::Edge> edges;
    std::vector<double> length;
    Eigen::SparseMatrix<double> A;
    Eigen::SparseMatrix<double> B;

    double max_h() const;
};

/// Same interior node count on every edge; at least 2 so that every edge
/// has a genuinely interior shape function.
FemDiscretization fem_discretize(const MetricGraph& mg, int interior_nodes_per_edge);

/// Per-edge counts max(8, ceil(length/h_target)).
FemDiscretization fem_discretize_h(const MetricGraph& mg, double h_target);

/// Mass matrix weighted by a function that is affine on every segment,
/// given by its nodal values (exact integration; the integrands are cubic).
Eigen::SparseMatrix<double> assemble_weighted_mass(const FemDiscretization& fem,
                                                   const Eigen::VectorXd& w_nodal);

/// First k eigenvalues of A x = lambda B x, ascending, kernel snapped to 0.
/// k = -1 returns all (dense path only).
std::vector<double> kirchhoff_spectrum(const FemDiscretization& fem, int k,
                                       bool use_iterative = false);

/// Eigenvalues on a mesh pair (h and exactly h/2) with the O(h^2) error
/// term cancelled: extrapolated = (4*fine - coarse) / 3.
struct RichardsonSpectrum {
    std::vector<double> coarse, fine, extrapolated;
    double h_coarse = 0.0, h_fine = 0.0;
};
RichardsonSpectrum kirchhoff_spectrum_richardson(const MetricGraph& mg, int interior_coarse,
                                                 int k, bool use_iterative = false);

/// The affine partition of unity {psi_v}: column v is 1 at vertex v, 0 at
/// the other vertices, affine along each edge. dof x n_vertex, and the
/// columns sum to the all-ones vector exactly.
Eigen::SparseMatrix<double> harmonic_partition(const FemDiscretization& fem);

/// nu(v) = integral of psi_v = half the total length incident to v.
Eigen::VectorXd vertex_measure(const FemDiscretization& fem,
                               const Eigen::SparseMatrix<double>& psi);

/// Star-shaped metric graph: one center, one leaf per length.
MetricGraph make_star(const std::vector<double>& lengths);

/// Second eigenvalues of the star Laplacian, unweighted and with the
/// measure weighted by the center's partition function (affine, 1 at the
/// center, 0 at the leaves). Both on the same mesh so the comparison
/// weighted >= unweighted is exact; the extrapolated unweighted value is
/// mesh-converged for absolute checks.
struct StarLambda2 {
    double weighted = 0.0;
    double unweighted = 0.0;
    double unweighted_extrapolated = 0.0;
};
StarLambda2 weighted_star_lambda2(const std::vector<double>& lengths, int interior = 8);

} // namespace fracspec
