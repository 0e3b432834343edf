#include "fracspec/que_report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "fracspec/errors.hpp"
#include "fracspec/spectra.hpp"

namespace fracspec {

namespace {

/// Largest singular value through the Gram matrix on the short side. The
/// Gram trick halves the exponent range but keeps full relative accuracy
/// for the top singular value, which is all we report.
double sigma_max_thin(const Eigen::MatrixXd& T) {
    if (T.size() == 0) return 0.0;
    Eigen::MatrixXd G;
    if (T.rows() <= T.cols())
        G = T * T.transpose();
    else
        G = T.transpose() * T;
    G = 0.5 * (G + G.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverFailure("Gram eigensolve failed");
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double hausdorff_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return 0.0;
    double worst = 0.0;
    auto one_sided = [&](const std::vector<double>& from, const std::vector<double>& to) {
        for (double x : from) {
            double best = std::numeric_limits<double>::infinity();
            for (double y : to) best = std::min(best, std::abs(x - y));
            worst = std::max(worst, best);
        }
    };
    one_sided(a, b);
    one_sided(b, a);
    return worst;
}

DefectSet componentwise_abs_diff(const DefectSet& a, const DefectSet& b) {
    DefectSet d;
    d.normJ = std::abs(a.normJ - b.normJ);
    d.adjointDefect = std::abs(a.adjointDefect - b.adjointDefect);
    d.jpj = std::abs(a.jpj - b.jpj);
    d.jjp = std::abs(a.jjp - b.jjp);
    d.compat1 = std::abs(a.compat1 - b.compat1);
    d.compat2 = std::abs(a.compat2 - b.compat2);
    d.formCloseness = std::abs(a.formCloseness - b.formCloseness);
    d.opDefect = std::abs(a.opDefect - b.opDefect);
    return d;
}

nlohmann::json defect_json(const DefectSet& d) {
    return nlohmann::json{{"normJ", d.normJ},
                          {"adjointDefect", d.adjointDefect},
                          {"jpj", d.jpj},
                          {"jjp", d.jjp},
                          {"compat1", d.compat1},
                          {"compat2", d.compat2},
                          {"formCloseness", d.formCloseness},
                          {"opDefect", d.opDefect}};
}

} // namespace

QueReport measure_quasi_unitarity(const IdentificationPair& pair, const WeightedGraph& g,
                                  const FemDiscretization& fem, double tau, int table_k) {
    const int n = g.n();
    const int dof = fem.dof;
    if (fem.n_vertex != n)
        throw DimensionMismatch("pair, graph and mesh do not share the vertex set");
    if (pair.psi.rows() != dof || pair.psi.cols() != n)
        throw DimensionMismatch("identification pair was built for a different mesh");

    // --- vertex side: Delta = M^{-1} L, symmetrized as M^{-1/2} L M^{-1/2}
    LaplacianPair lap = laplacian(g);
    Eigen::VectorXd ms = lap.M.cwiseSqrt();
    Eigen::VectorXd mis = ms.cwiseInverse();
    Eigen::MatrixXd delta_sym = mis.asDiagonal() * Eigen::MatrixXd(lap.L) * mis.asDiagonal();
    delta_sym = 0.5 * (delta_sym + delta_sym.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> des(delta_sym);
    if (des.info() != Eigen::Success) throw SolverFailure("vertex eigendecomposition failed");
    Eigen::VectorXd lam = des.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd& U = des.eigenvectors();

    // --- metric side: one dense eigendecomposition of the pencil (tau A, B)
    Eigen::MatrixXd A_tau = tau * Eigen::MatrixXd(fem.A);
    Eigen::MatrixXd B_dense = Eigen::MatrixXd(fem.B);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A_tau, B_dense);
    if (ges.info() != Eigen::Success) throw SolverFailure("metric eigendecomposition failed");
    Eigen::VectorXd lamt = ges.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd& Phi = ges.eigenvectors(); // B-orthonormal columns

    // resolvent weights: (1+lambda)^{-1/2} and (1+lambda)^{-1}
    Eigen::VectorXd r_half = (1.0 + lam.array()).rsqrt();
    Eigen::VectorXd r_full = (1.0 + lam.array()).inverse();
    Eigen::VectorXd rt_half = (1.0 + lamt.array()).rsqrt();
    Eigen::VectorXd rt_full = (1.0 + lamt.array()).inverse();

    // --- both operators in orthonormal coordinates
    //     discrete: f -> M^{1/2} f;  metric: u -> Phi^T B u
    Eigen::MatrixXd BJ = Eigen::MatrixXd(fem.B * pair.J); // dof x n
    Eigen::MatrixXd Jhat = Phi.transpose() * (BJ * mis.asDiagonal());
    Eigen::MatrixXd Jphat = ms.asDiagonal() * (Eigen::MatrixXd(pair.Jp) * Phi);
    Eigen::MatrixXd J1phat = (1.0 / pair.c) * (ms.asDiagonal() * Phi.topRows(n));

    QueReport rep;
    rep.measured.normJ = sigma_max_thin(Jhat);
    rep.measured.adjointDefect = sigma_max_thin(Jhat.transpose() - Jphat);

    // (I - J'J) R^{1/2} lives entirely on the vertex side; J'J uses the
    // exact partition Gram matrix, so this defect carries no mesh error.
    Eigen::MatrixXd G = Eigen::MatrixXd(pair.psi.transpose() * (fem.B * pair.psi));
    Eigen::MatrixXd JpJ_sym =
        ms.asDiagonal() * (pair.nu.cwiseInverse().asDiagonal() * G) * mis.asDiagonal();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - JpJ_sym;
    Eigen::MatrixXd R_half_mat = U * r_half.asDiagonal() * U.transpose();
    rep.measured.jpj = sigma_max_thin(P * R_half_mat);

    // (I - JJ') Rt^{1/2}: a rank-n perturbation of a diagonal, normed
    // matrix-free (the only dof x dof operator in the report).
    {
        auto tt_matvec = [&](const Eigen::VectorXd& y) {
            Eigen::VectorXd t = rt_half.asDiagonal() * y;
            t -= Jhat * (Jphat * t);
            Eigen::VectorXd s = t - Jphat.transpose() * (Jhat.transpose() * t);
            return Eigen::VectorXd(rt_half.asDiagonal() * s);
        };
        rep.measured.jjp = std::sqrt(std::max(0.0, symmetric_lambda_max(dof, tt_matvec)));
    }

    rep.measured.compat1 = 0.0; // J1 and J are the same matrix
    rep.measured.compat2 = sigma_max_thin((J1phat - Jphat) * rt_half.asDiagonal());

    // form closeness: the mixed defect e_metric(Jf, u) - e(f, J'1 u) reads
    // f^T Z u with Z = c tau Psi^T A - (1/c) L E; divide by the form norms
    // (M+L)^{1/2} and (I+Lambda)^{1/2} on the two sides.
    {
        Eigen::SparseMatrix<double> extract = pair.c * pair.J1p;
        Eigen::SparseMatrix<double> Zs =
            pair.c * tau * Eigen::SparseMatrix<double>(pair.psi.transpose() * fem.A) -
            (1.0 / pair.c) * Eigen::SparseMatrix<double>(lap.L * extract);
        Eigen::MatrixXd W = Eigen::MatrixXd(Zs) * Phi; // n x dof
        W = W * rt_half.asDiagonal();

        Eigen::MatrixXd S = Eigen::MatrixXd(lap.L);
        S += Eigen::MatrixXd(Eigen::VectorXd(lap.M).asDiagonal());
        S = 0.5 * (S + S.transpose().eval());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ses(S);
        if (ses.info() != Eigen::Success) throw SolverFailure("form-norm eigensolve failed");
        Eigen::VectorXd s_invhalf = ses.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
        Eigen::MatrixXd S_mhalf =
            ses.eigenvectors() * s_invhalf.asDiagonal() * ses.eigenvectors().transpose();
        rep.measured.formCloseness = sigma_max_thin(S_mhalf * W);
    }

    // operator defect ||Rt J - J R||
    Eigen::MatrixXd R_full_mat = U * r_full.asDiagonal() * U.transpose();
    rep.measured.opDefect = sigma_max_thin(rt_full.asDiagonal() * Jhat - Jhat * R_full_mat);

    // eigenvalue table and resolvent-set Hausdorff distance
    std::vector<double> lam_v(lam.data(), lam.data() + lam.size());
    std::vector<double> lamt_v(lamt.data(), lamt.data() + lamt.size());
    snap_kernel(lam_v, 1e-10 * std::max(1.0, lam.maxCoeff()));
    snap_kernel(lamt_v, 1e-10 * std::max(1.0, lamt.maxCoeff()));
    SpectralComparison cmp = spectral_compare(lam_v, lamt_v, table_k);
    rep.eigenvalues = std::move(cmp.table);
    rep.hausdorff_resolvent = cmp.hausdorff;
    rep.spectra_truncated_to = cmp.truncated_to;
    return rep;
}

QueReport measure_quasi_unitarity(const IdentificationPair& pair, const LevelGraph& level,
                                  const FemDiscretization& fem, double tau, int table_k) {
    return measure_quasi_unitarity(pair, level.graph, fem, tau, table_k);
}

namespace {

QueReport refine_and_measure(const WeightedGraph& g, const MetricGraph& mg, double c, double tau,
                             int interior_coarse, int table_k) {
    FemDiscretization fem_c = fem_discretize(mg, interior_coarse);
    FemDiscretization fem_f = fem_discretize(mg, 2 * interior_coarse + 1);
    IdentificationPair pair_c = build_identification(g, fem_c, c, tau);
    IdentificationPair pair_f = build_identification(g, fem_f, c, tau);
    QueReport coarse = measure_quasi_unitarity(pair_c, g, fem_c, tau, table_k);
    QueReport rep = measure_quasi_unitarity(pair_f, g, fem_f, tau, table_k);
    rep.fem_error = componentwise_abs_diff(rep.measured, coarse.measured);
    rep.delta_theory = delta_metric_graph(stats(g));
    rep.delta_op_theory = form_to_op(rep.delta_theory);
    return rep;
}

} // namespace

QueReport measure_with_refinement(const LevelGraph& level, const MetricGraph& mg,
                                  const ScalingPlan& plan, int interior_coarse, int table_k) {
    return refine_and_measure(level.graph, mg, plan.c(), plan.tau_value(), interior_coarse,
                              table_k);
}

QueReport measure_with_refinement(const Subdivision& sub, int interior_coarse, int table_k) {
    return refine_and_measure(sub.discrete, sub.metric, 1.0, 1.0, interior_coarse, table_k);
}

double delta_metric_graph(const GraphStats& s) {
    return std::sqrt(2.0 * s.c_gamma * s.max_inv_rel_weight);
}

double delta_uniform(const GraphStats& s) {
    return std::sqrt(2.0 * s.c_gamma * s.c_gamma * s.d_max * s.c_mu / s.rho_min);
}

double delta_general(double alpha_inf, double max_inv_rel_weight, double tau, double lambda2,
                     double sup_delta_c_sq, double sup_delta_d_sq) {
    if (alpha_inf < 0.0 || max_inv_rel_weight < 0.0 || sup_delta_c_sq < 0.0 ||
        sup_delta_d_sq < 0.0)
        throw DomainError("defect ingredients must be nonnegative");
    if (alpha_inf > 0.5)
        throw DomainError("vertex-weight deviation exceeds 1/2; no equivalence bound applies");
    if (!(tau > 0.0) || !(lambda2 > 0.0))
        throw DomainError("energy rescaling and cell spectral gap must be positive");
    const double sq = std::max({2.0 * alpha_inf, 2.0 * max_inv_rel_weight,
                                2.0 / (tau * lambda2), 2.0 * sup_delta_c_sq / tau,
                                4.0 * sup_delta_d_sq / tau});
    return std::sqrt(sq);
}

double compose_delta(double delta, double delta_tilde) {
    if (!(delta >= 0.0) || !(delta_tilde >= 0.0) || delta > 1.0 || delta_tilde > 1.0)
        throw OutOfRange("composition requires defects in [0, 1]");
    return 22.0 * delta + 43.0 * delta_tilde;
}

Rational compose_delta(const Rational& delta, const Rational& delta_tilde) {
    const Rational zero(0), one(1);
    if (delta < zero || delta_tilde < zero || one < delta || one < delta_tilde)
        throw OutOfRange("composition requires defects in [0, 1]");
    return Rational(22) * delta + Rational(43) * delta_tilde;
}

double form_to_op(double delta) {
    if (!(delta >= 0.0)) throw OutOfRange("form defect must be nonnegative");
    return 4.0 * delta;
}

SpectralComparison spectral_compare(const std::vector<double>& a, const std::vector<double>& b,
                                    int k) {
    SpectralComparison out;
    const int kk = std::max(0, std::min({k, static_cast<int>(a.size()),
                                         static_cast<int>(b.size())}));
    out.truncated_to = kk;
    std::vector<double> ra, rb;
    ra.reserve(kk);
    rb.reserve(kk);
    for (int i = 0; i < kk; ++i) {
        out.table.push_back({i + 1, a[i], b[i], std::abs(a[i] - b[i])});
        ra.push_back(1.0 / (1.0 + a[i]));
        rb.push_back(1.0 / (1.0 + b[i]));
    }
    out.hausdorff = hausdorff_distance(ra, rb);
    return out;
}

std::string QueReport::to_json() const {
    nlohmann::json j;
    j["defects"] = defect_json(measured);
    j["fem_error_estimate"] = defect_json(fem_error);
    j["delta_theory"] = delta_theory;
    j["delta_op_theory"] = delta_op_theory;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : eigenvalues)
        rows.push_back(nlohmann::json{{"k", r.k},
                                      {"lambda_discrete", r.lambda_discrete},
                                      {"lambda_metric", r.lambda_metric},
                                      {"diff", r.diff}});
    j["eigenvalues"] = rows;
    j["hausdorff_resolvent"] = hausdorff_resolvent;
    j["spectra_truncated_to"] = spectra_truncated_to;
    j["transitivity_estimate_flagged"] = transitivity_estimate_flagged;
    return j.dump(2) + "\n";
}

} // namespace fracspec
