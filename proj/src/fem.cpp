#include "fracspec/fem.hpp"

#include <algorithm>
#include <cmath>

#include "fracspec/errors.hpp"
#include "fracspec/spectra.hpp"

namespace fracspec {

double FemDiscretization::max_h() const {
    return *std::max_element(seg_h.begin(), seg_h.end());
}

namespace {

FemDiscretization discretize(const MetricGraph& mg, const std::vector<int>& interior) {
    FemDiscretization fem;
    fem.n_vertex = mg.graph.n();
    fem.edges = mg.graph.edges;
    fem.length = mg.length;
    fem.interior_count = interior;
    fem.interior_start.resize(interior.size());
    int next = fem.n_vertex;
    for (size_t e = 0; e < interior.size(); ++e) {
        fem.interior_start[e] = next;
        next += interior[e];
        fem.seg_h.push_back(mg.length[e] / (interior[e] + 1));
    }
    fem.dof = next;

    std::vector<Eigen::Triplet<double>> ta, tb;
    auto add_segment = [&](int p, int q, double h) {
        const double k = 1.0 / h;
        ta.emplace_back(p, p, k);
        ta.emplace_back(q, q, k);
        ta.emplace_back(p, q, -k);
        ta.emplace_back(q, p, -k);
        const double mdiag = h / 3.0, moff = h / 6.0;
        tb.emplace_back(p, p, mdiag);
        tb.emplace_back(q, q, mdiag);
        tb.emplace_back(p, q, moff);
        tb.emplace_back(q, p, moff);
    };
    for (size_t e = 0; e < fem.edges.size(); ++e) {
        const int n = fem.interior_count[e];
        const double h = fem.seg_h[e];
        int prev = fem.edges[e].u;
        for (int t = 0; t < n; ++t) {
            const int node = fem.interior_start[e] + t;
            add_segment(prev, node, h);
            prev = node;
        }
        add_segment(prev, fem.edges[e].v, h);
    }
    fem.A.resize(fem.dof, fem.dof);
    fem.A.setFromTriplets(ta.begin(), ta.end());
    fem.A.makeCompressed();
    fem.B.resize(fem.dof, fem.dof);
    fem.B.setFromTriplets(tb.begin(), tb.end());
    fem.B.makeCompressed();
    return fem;
}

// apriori scale of the largest pencil eigenvalue, used for kernel snapping
double pencil_scale(const FemDiscretization& fem) {
    double s = 1.0;
    Eigen::VectorXd da = fem.A.diagonal(), db = fem.B.diagonal();
    for (int i = 0; i < fem.dof; ++i) s = std::max(s, da[i] / db[i]);
    return s;
}

} // namespace

FemDiscretization fem_discretize(const MetricGraph& mg, int interior_nodes_per_edge) {
    if (interior_nodes_per_edge < 2)
        throw ConfigError("need at least 2 interior nodes per edge");
    if (mg.graph.edges.empty()) throw ConfigError("metric graph has no edges");
    return discretize(mg, std::vector<int>(mg.graph.edges.size(), interior_nodes_per_edge));
}

FemDiscretization fem_discretize_h(const MetricGraph& mg, double h_target) {
    if (!(h_target > 0.0)) throw ConfigError("mesh width must be positive");
    if (mg.graph.edges.empty()) throw ConfigError("metric graph has no edges");
    std::vector<int> interior(mg.graph.edges.size());
    for (size_t e = 0; e < interior.size(); ++e)
        interior[e] = std::max(8, static_cast<int>(std::ceil(mg.length[e] / h_target)));
    return discretize(mg, interior);
}

Eigen::SparseMatrix<double> assemble_weighted_mass(const FemDiscretization& fem,
                                                   const Eigen::VectorXd& w_nodal) {
    if (w_nodal.size() != fem.dof) throw DimensionMismatch("weight must be nodal on the mesh");
    std::vector<Eigen::Triplet<double>> tb;
    auto add_segment = [&](int p, int q, double h) {
        const double w0 = w_nodal[p], w1 = w_nodal[q];
        // exact integrals of an affine weight against P1 products
        tb.emplace_back(p, p, h * (3 * w0 + w1) / 12.0);
        tb.emplace_back(q, q, h * (w0 + 3 * w1) / 12.0);
        tb.emplace_back(p, q, h * (w0 + w1) / 12.0);
        tb.emplace_back(q, p, h * (w0 + w1) / 12.0);
    };
    for (size_t e = 0; e < fem.edges.size(); ++e) {
        const int n = fem.interior_count[e];
        const double h = fem.seg_h[e];
        int prev = fem.edges[e].u;
        for (int t = 0; t < n; ++t) {
            const int node = fem.interior_start[e] + t;
            add_segment(prev, node, h);
            prev = node;
        }
        add_segment(prev, fem.edges[e].v, h);
    }
    Eigen::SparseMatrix<double> bw(fem.dof, fem.dof);
    bw.setFromTriplets(tb.begin(), tb.end());
    bw.makeCompressed();
    return bw;
}

std::vector<double> kirchhoff_spectrum(const FemDiscretization& fem, int k, bool use_iterative) {
    std::vector<double> out;
    if (use_iterative && k > 0) {
        // shift on the scale of the low spectrum keeps shift-invert focused
        const double shift = std::max(1e-8, 1.0 / (fem.dof * fem.max_h()));
        out = smallest_eigenvalues_lanczos(fem.A, fem.B, k, shift);
    } else {
        Eigen::VectorXd evs = generalized_eigenvalues_dense(fem.A, fem.B);
        out.assign(evs.data(), evs.data() + evs.size());
        if (k > 0 && k < static_cast<int>(out.size())) out.resize(k);
    }
    snap_kernel(out, 1e-10 * pencil_scale(fem));
    std::sort(out.begin(), out.end());
    return out;
}

RichardsonSpectrum kirchhoff_spectrum_richardson(const MetricGraph& mg, int interior_coarse,
                                                 int k, bool use_iterative) {
    RichardsonSpectrum rs;
    // doubling segments halves h exactly: n interior -> 2n+1
    FemDiscretization coarse = fem_discretize(mg, interior_coarse);
    FemDiscretization fine = fem_discretize(mg, 2 * interior_coarse + 1);
    rs.h_coarse = coarse.max_h();
    rs.h_fine = fine.max_h();
    rs.coarse = kirchhoff_spectrum(coarse, k, use_iterative);
    rs.fine = kirchhoff_spectrum(fine, k, use_iterative);
    const size_t n = std::min(rs.coarse.size(), rs.fine.size());
    rs.extrapolated.resize(n);
    for (size_t i = 0; i < n; ++i)
        rs.extrapolated[i] = (4.0 * rs.fine[i] - rs.coarse[i]) / 3.0;
    return rs;
}

Eigen::SparseMatrix<double> harmonic_partition(const FemDiscretization& fem) {
    std::vector<Eigen::Triplet<double>> tp;
    for (int v = 0; v < fem.n_vertex; ++v) tp.emplace_back(v, v, 1.0);
    for (size_t e = 0; e < fem.edges.size(); ++e) {
        const int n = fem.interior_count[e];
        for (int t = 0; t < n; ++t) {
            const double f = static_cast<double>(t + 1) / (n + 1);
            tp.emplace_back(fem.interior_start[e] + t, fem.edges[e].u, 1.0 - f);
            tp.emplace_back(fem.interior_start[e] + t, fem.edges[e].v, f);
        }
    }
    Eigen::SparseMatrix<double> psi(fem.dof, fem.n_vertex);
    psi.setFromTriplets(tp.begin(), tp.end());
    psi.makeCompressed();
    return psi;
}

Eigen::VectorXd vertex_measure(const FemDiscretization& fem,
                               const Eigen::SparseMatrix<double>& psi) {
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(fem.dof);
    return psi.transpose() * (fem.B * ones);
}

MetricGraph make_star(const std::vector<double>& lengths) {
    if (lengths.empty()) throw ConfigError("star needs at least one edge");
    std::vector<std::string> ids{"c"};
    std::vector<WeightedGraph::Edge> edges;
    std::vector<double> mu(1, 0.0);
    for (size_t i = 0; i < lengths.size(); ++i) {
        if (!(lengths[i] > 0.0)) throw LengthMismatch("edge lengths must be positive");
        ids.push_back("l" + std::to_string(i + 1));
        edges.push_back({0, static_cast<int>(i + 1), 1.0 / lengths[i]});
        mu[0] += 0.5 * lengths[i];
        mu.push_back(0.5 * lengths[i]);
    }
    return make_metric(build_graph_indexed(std::move(ids), std::move(edges), std::move(mu)),
                       lengths);
}

StarLambda2 weighted_star_lambda2(const std::vector<double>& lengths, int interior) {
    MetricGraph star = make_star(lengths);
    FemDiscretization fem = fem_discretize(star, interior);
    Eigen::SparseMatrix<double> psi = harmonic_partition(fem);
    Eigen::VectorXd psi_center = Eigen::VectorXd(psi.col(0));
    Eigen::SparseMatrix<double> b_psi = assemble_weighted_mass(fem, psi_center);

    Eigen::VectorXd unw = generalized_eigenvalues_dense(fem.A, fem.B);
    Eigen::VectorXd wgt = generalized_eigenvalues_dense(fem.A, b_psi);
    if (unw.size() < 2 || wgt.size() < 2) throw SolverFailure("star spectrum truncated");

    StarLambda2 out;
    out.unweighted = unw[1];
    out.weighted = wgt[1];

    FemDiscretization fine = fem_discretize(star, 2 * interior + 1);
    Eigen::VectorXd unw_fine = generalized_eigenvalues_dense(fine.A, fine.B);
    out.unweighted_extrapolated = (4.0 * unw_fine[1] - unw[1]) / 3.0;
    return out;
}

} // namespace fracspec
