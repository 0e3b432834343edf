#include "fracspec/spectra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

#include "fracspec/errors.hpp"

namespace fracspec {

Eigen::VectorXd generalized_eigenvalues_dense(const Eigen::SparseMatrix<double>& A,
                                              const Eigen::SparseMatrix<double>& B) {
    Eigen::MatrixXd Ad = Eigen::MatrixXd(A);
    Eigen::MatrixXd Bd = Eigen::MatrixXd(B);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(Ad, Bd, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw SolverFailure("generalized eigensolver did not converge");
    return solver.eigenvalues();
}

Eigen::VectorXd generalized_eigenvalues_dense(const Eigen::SparseMatrix<double>& A,
                                              const Eigen::VectorXd& b_diag) {
    const Eigen::VectorXd inv_sqrt = b_diag.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd S = Eigen::MatrixXd(A);
    S = inv_sqrt.asDiagonal() * S * inv_sqrt.asDiagonal();
    // symmetrize against roundoff from the two scalings
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw SolverFailure("symmetric eigensolver did not converge");
    return solver.eigenvalues();
}

namespace {

// Shared Lanczos core: largest eigenvalues of the symmetric operator op.
// Full reorthogonalization; returns Ritz values (descending) once the
// leading `want` of them have residuals below tol, or after max_iter steps.
std::vector<double> lanczos_largest(int dim,
                                    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op,
                                    int want,
                                    int max_iter,
                                    double tol) {
    want = std::min(want, dim);
    max_iter = std::min(max_iter, dim);
    Eigen::MatrixXd V(dim, max_iter + 1);
    std::vector<double> alpha, beta;

    // deterministic pseudo-random start vector
    Eigen::VectorXd v0(dim);
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;
    for (int i = 0; i < dim; ++i) {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        v0[i] = static_cast<double>(state % 10007) / 10007.0 - 0.5;
    }
    v0.normalize();
    V.col(0) = v0;

    std::vector<double> ritz;
    for (int j = 0; j < max_iter; ++j) {
        Eigen::VectorXd w = op(V.col(j));
        double a = V.col(j).dot(w);
        alpha.push_back(a);
        w -= a * V.col(j);
        if (j > 0) w -= beta[j - 1] * V.col(j - 1);
        // full reorthogonalization, twice for stability
        for (int pass = 0; pass < 2; ++pass)
            w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
        double b = w.norm();

        const int msize = j + 1;
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(msize, msize);
        for (int i = 0; i < msize; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < msize) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        if (es.info() != Eigen::Success) throw SolverFailure("Lanczos tridiagonal solve failed");

        bool converged = msize >= want;
        if (converged) {
            // residual of Ritz pair i is |beta_j * last component|
            for (int i = 0; i < want; ++i) {
                const int col = msize - 1 - i; // largest Ritz values sit at the end
                double resid = std::abs(b * es.eigenvectors()(msize - 1, col));
                double scale = std::max(1.0, std::abs(es.eigenvalues()(col)));
                if (resid > tol * scale) {
                    converged = false;
                    break;
                }
            }
        }
        if (converged || b < 1e-14 || j == max_iter - 1) {
            ritz.assign(es.eigenvalues().data(), es.eigenvalues().data() + msize);
            std::reverse(ritz.begin(), ritz.end());
            if (converged || b < 1e-14) break;
            if (j == max_iter - 1) break;
        }
        beta.push_back(b);
        V.col(j + 1) = w / b;
    }
    if (static_cast<int>(ritz.size()) < want)
        throw SolverFailure("Lanczos did not produce enough Ritz values");
    ritz.resize(want);
    return ritz;
}

} // namespace

std::vector<double> smallest_eigenvalues_lanczos(const Eigen::SparseMatrix<double>& A,
                                                 const Eigen::SparseMatrix<double>& B,
                                                 int k,
                                                 double shift,
                                                 int max_iter,
                                                 double tol) {
    const int dim = static_cast<int>(A.rows());
    if (k < 1 || k > dim) throw SolverFailure("requested eigenvalue count out of range");

    // (A + shift B) is SPD for shift > 0; Lanczos on the B-inner-product
    // operator (A + shift B)^{-1} B, symmetrized as
    // C = B^{1/2} (A + shift B)^{-1} B^{1/2} via y = B^{1/2} x.
    // B here is not diagonal in general, so work with the similarity-free
    // form: run Lanczos on op(x) = L^T ((A+sB)^{-1} (L x)) where B = L L^T
    // (sparse Cholesky of B).
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> bchol(B);
    if (bchol.info() != Eigen::Success) throw SolverFailure("mass matrix not positive definite");
    Eigen::SparseMatrix<double> shifted = A + shift * B;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
    if (solver.info() != Eigen::Success) throw SolverFailure("shift-invert factorization failed");

    Eigen::SparseMatrix<double> Lb = bchol.matrixL();
    // account for the permutation of the Cholesky: B = P' L L' P
    Eigen::PermutationMatrix<Eigen::Dynamic> perm = bchol.permutationPinv();

    auto op = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd bx = perm * (Lb * x);        // B^{1/2}-like factor
        Eigen::VectorXd y = solver.solve(bx);
        Eigen::VectorXd out = Lb.transpose() * (perm.transpose() * y);
        return out;
    };

    std::vector<double> inv = lanczos_largest(dim, op, k, max_iter, tol);
    std::vector<double> lambdas;
    lambdas.reserve(k);
    for (double nu : inv) lambdas.push_back(1.0 / nu - shift);
    std::sort(lambdas.begin(), lambdas.end());
    return lambdas;
}

double symmetric_lambda_max(int dim,
                            const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& matvec,
                            int max_iter,
                            double tol) {
    std::vector<double> top = lanczos_largest(dim, matvec, 1, max_iter, tol);
    return top.front();
}

void snap_kernel(std::vector<double>& eigenvalues, double threshold) {
    for (double& ev : eigenvalues)
        if (std::abs(ev) < threshold) ev = 0.0;
}

void snap_kernel(Eigen::VectorXd& eigenvalues, double threshold) {
    for (int i = 0; i < eigenvalues.size(); ++i)
        if (std::abs(eigenvalues[i]) < threshold) eigenvalues[i] = 0.0;
}

} // namespace fracspec
