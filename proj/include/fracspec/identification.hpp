#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fracspec/fem.hpp"
#include "fracspec/metric_graph.hpp"
#include "fracspec/pcf_system.hpp"

namespace fracspec {

/// Smoothing/discretization operator pair between the weighted vertex space
/// l2(V, mu) and the P1 space on the metric graph, in FEM coordinates:
///
///   (J f)     = c * sum_v f(v) psi_v                      (dof x n)
///   (J' u)(v) = <psi_v, u> / (c nu(v))                    (n x dof)
///   J1  = J restricted to form domains (same matrix)
///   (J'1 u)(v) = u(v) / c                                 (n x dof)
///
/// psi_v is the affine partition of unity, nu(v) = integral of psi_v. Since
/// psi_v lies in the P1 space, every integral is an exact mass-matrix
/// product; the operators carry no quadrature error.
struct IdentificationPair {
    Eigen::SparseMatrix<double> psi; // dof x n partition matrix
    Eigen::SparseMatrix<double> J;   // c * psi
    Eigen::SparseMatrix<double> Jp;  // (1/c) diag(nu)^{-1} psi^T B
    Eigen::SparseMatrix<double> J1p; // (1/c) * vertex-value extraction
    Eigen::VectorXd nu;              // nu(v)
    double c = 1.0;                  // isometric rescaling factor
    double tau = 1.0;                // energy rescaling factor
};

/// Assembles the pair for a discrete graph sharing its vertices with the
/// FEM discretization. Enforces:
///   - nu(v)/mu(v) constant across vertices (relative variation <= 1e-10;
///     IncompatibleWeights otherwise) -- the constant is 1/c^2,
///   - the partition identity nu(v) = sum_w <psi_v, psi_w> to 1e-12 and
///     J 1 = c 1 exactly (NumericalError otherwise),
///   - matching dimensions (DimensionMismatch).
IdentificationPair build_identification(const WeightedGraph& g, const FemDiscretization& fem,
                                        double c, double tau);

/// Level-graph form: c and tau come from the scaling plan attached to the
/// compatible metric graph.
IdentificationPair build_identification(const LevelGraph& level, const MetricGraph& mg,
                                        const FemDiscretization& fem, const ScalingPlan& plan);

/// Subdivision pairs are compatible with c = 1, tau = 1.
IdentificationPair build_identification(const Subdivision& sub, const FemDiscretization& fem);

} // namespace fracspec
