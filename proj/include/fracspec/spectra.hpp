#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fracspec {

/// All eigenvalues of the pencil A x = lambda B x with A symmetric and
/// B symmetric positive definite, ascending. Dense; intended for the desk
/// scales this library runs at (a few thousand unknowns).
Eigen::VectorXd generalized_eigenvalues_dense(const Eigen::SparseMatrix<double>& A,
                                              const Eigen::SparseMatrix<double>& B);

/// Same pencil with diagonal B (graph mass); solved by symmetric reduction
/// B^{-1/2} A B^{-1/2}, which keeps the problem exactly symmetric.
Eigen::VectorXd generalized_eigenvalues_dense(const Eigen::SparseMatrix<double>& A,
                                              const Eigen::VectorXd& b_diag);

/// Smallest k eigenvalues of A x = lambda B x via shift-invert Lanczos with
/// full reorthogonalization (sparse LDLT of A + shift*B). Deterministic
/// start vector. Escape hatch for problems too large to solve densely.
std::vector<double> smallest_eigenvalues_lanczos(const Eigen::SparseMatrix<double>& A,
                                                 const Eigen::SparseMatrix<double>& B,
                                                 int k,
                                                 double shift = 1.0,
                                                 int max_iter = 300,
                                                 double tol = 1e-12);

/// Largest eigenvalue of a symmetric operator given only its matvec.
/// Lanczos with full reorthogonalization and a deterministic start vector;
/// used for operator norms of large implicitly-represented matrices.
double symmetric_lambda_max(int dim,
                            const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& matvec,
                            int max_iter = 200,
                            double tol = 1e-13);

/// Replaces eigenvalues below threshold with exactly 0 (kernel snapping).
void snap_kernel(std::vector<double>& eigenvalues, double threshold);
void snap_kernel(Eigen::VectorXd& eigenvalues, double threshold);

} // namespace fracspec
