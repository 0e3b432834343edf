#include "fracspec/pcf_system.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>

#include "fracspec/errors.hpp"

namespace fracspec {

int boundary_edge_index(int N0, int a, int b) {
    if (a > b) std::swap(a, b);
    return (a - 1) * N0 - a * (a + 1) / 2 + b - 1;
}

namespace {

std::string render_address(const std::vector<int>& word, int boundary) {
    std::string s;
    for (size_t i = 0; i < word.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(word[i]);
    }
    s += ':';
    s += std::to_string(boundary);
    return s;
}

// union-find keeping the minimum element of each class as its root, so the
// roots enumerate classes in canonical (lexicographic address) order
struct MinUnionFind {
    std::vector<int> parent;
    explicit MinUnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
    }
};

LevelGraph make_generation0(const PcfSystem& sys) {
    LevelGraph g0;
    g0.m = 0;
    std::vector<std::string> ids;
    std::vector<double> mu;
    for (int a = 1; a <= sys.N0; ++a) {
        ids.push_back(render_address({}, a));
        mu.push_back(1.0 / sys.N0);
        g0.address_word.push_back({});
        g0.address_boundary.push_back(a);
        g0.card.push_back(1);
        g0.boundary_pos.push_back(a - 1);
    }
    std::vector<WeightedGraph::Edge> edges;
    for (int a = 1; a <= sys.N0; ++a)
        for (int b = a + 1; b <= sys.N0; ++b) {
            const int idx = boundary_edge_index(sys.N0, a, b);
            edges.push_back({a - 1, b - 1, sys.gamma0[idx].to_double()});
            g0.ancestor.push_back(idx);
        }
    g0.graph = build_graph_indexed(ids, edges, mu);
    return g0;
}

LevelGraph next_generation(const PcfSystem& sys, const LevelGraph& prev) {
    const int nv = prev.graph.n();
    const int n_cand = sys.N * nv;
    MinUnionFind uf(n_cand);
    for (const auto& g : sys.gluings) {
        const int c1 = (g.j - 1) * nv + prev.boundary_pos[g.a - 1];
        const int c2 = (g.j2 - 1) * nv + prev.boundary_pos[g.b - 1];
        uf.unite(c1, c2);
    }

    LevelGraph cur;
    cur.m = prev.m + 1;
    cur.cell_vertex.assign(sys.N, std::vector<int>(nv, -1));

    // roots appear in ascending candidate order, which by induction is
    // lexicographic order of the canonical addresses
    std::vector<int> class_of(n_cand, -1);
    std::vector<std::string> ids;
    for (int c = 0; c < n_cand; ++c) {
        const int root = uf.find(c);
        const int j = c / nv + 1;
        const int x = c % nv;
        if (root == c) {
            const int v = static_cast<int>(ids.size());
            class_of[c] = v;
            cur.canon_cell.push_back(j);
            cur.canon_prev.push_back(x);
            std::vector<int> word;
            word.reserve(prev.address_word[x].size() + 1);
            word.push_back(j);
            word.insert(word.end(), prev.address_word[x].begin(), prev.address_word[x].end());
            cur.address_boundary.push_back(prev.address_boundary[x]);
            ids.push_back(render_address(word, cur.address_boundary.back()));
            cur.address_word.push_back(std::move(word));
            cur.card.push_back(0);
        }
    }
    for (int c = 0; c < n_cand; ++c) {
        const int v = class_of[uf.find(c)];
        cur.cell_vertex[c / nv][c % nv] = v;
        cur.card[v] += prev.card[c % nv];
    }

    double denom = sys.N0;
    for (int i = 0; i < cur.m; ++i) denom *= sys.N;
    std::vector<double> mu(ids.size());
    for (size_t v = 0; v < ids.size(); ++v) mu[v] = static_cast<double>(cur.card[v]) / denom;

    const double gamma_scale = sys.r.pow(-cur.m).to_double();
    std::vector<WeightedGraph::Edge> edges;
    edges.reserve(sys.N * prev.graph.edges.size());
    for (int j = 0; j < sys.N; ++j)
        for (size_t e = 0; e < prev.graph.edges.size(); ++e) {
            const auto& pe = prev.graph.edges[e];
            const int anc = prev.ancestor[e];
            edges.push_back({cur.cell_vertex[j][pe.u], cur.cell_vertex[j][pe.v],
                             gamma_scale * sys.gamma0[anc].to_double()});
            cur.ancestor.push_back(anc);
        }
    try {
        cur.graph = build_graph_indexed(std::move(ids), std::move(edges), std::move(mu));
    } catch (const ConfigError& err) {
        throw InconsistentGluing(std::string("gluing rules degenerate at generation ") +
                                 std::to_string(cur.m) + ": " + err.what());
    }

    cur.embed_prev.resize(nv);
    for (int x = 0; x < nv; ++x) {
        if (prev.m == 0) {
            // q_a is the fixed point of cell a: its copy in cell a is itself
            cur.embed_prev[x] = cur.cell_vertex[x][x];
        } else {
            cur.embed_prev[x] = cur.cell_vertex[prev.canon_cell[x] - 1][prev.embed_prev[prev.canon_prev[x]]];
        }
    }
    cur.boundary_pos.resize(sys.N0);
    for (int a = 0; a < sys.N0; ++a) cur.boundary_pos[a] = cur.embed_prev[prev.boundary_pos[a]];
    return cur;
}

} // namespace

PcfSystem validate_system(PcfSystem sys) {
    if (sys.N0 < 2) throw ConfigError("N0 must be at least 2");
    if (sys.N < sys.N0) throw ConfigError("N must be at least N0");
    if (!(Rational(0) < sys.theta && sys.theta < Rational(1)))
        throw ConfigError("theta must lie strictly between 0 and 1");
    if (!(Rational(0) < sys.r && sys.r < Rational(1)))
        throw ConfigError("r must lie strictly between 0 and 1");
    if (static_cast<int>(sys.gamma0.size()) != sys.edge_count0())
        throw ConfigError("gamma0 must have one entry per boundary pair (" +
                          std::to_string(sys.edge_count0()) + " expected)");
    for (const auto& g : sys.gamma0)
        if (!(g > Rational(0))) throw ConfigError("gamma0 entries must be positive");

    sys.C1 = sys.C2 = sys.gamma0[0];
    for (const auto& g : sys.gamma0) {
        sys.C1 = std::min(sys.C1, g, [](const Rational& x, const Rational& y) { return x < y; });
        sys.C2 = std::max(sys.C2, g, [](const Rational& x, const Rational& y) { return x < y; });
    }

    // boundary symmetry: the same C0 at every boundary vertex
    for (int a = 1; a <= sys.N0; ++a) {
        Rational c(0);
        for (int b = 1; b <= sys.N0; ++b)
            if (b != a) c = c + Rational(1) / sys.gamma0[boundary_edge_index(sys.N0, a, b)];
        if (a == 1)
            sys.C0 = c;
        else if (c != sys.C0)
            throw ConfigError("boundary symmetry violated: vertex " + std::to_string(a) +
                              " has inverse-conductance sum " + c.to_string() + ", expected " +
                              sys.C0.to_string());
    }

    for (const auto& g : sys.gluings) {
        if (g.j < 1 || g.j > sys.N || g.j2 < 1 || g.j2 > sys.N)
            throw ConfigError("gluing cell index out of range");
        if (g.a < 1 || g.a > sys.N0 || g.b < 1 || g.b > sys.N0)
            throw ConfigError("gluing boundary index out of range");
        if (g.j == g.j2)
            throw InconsistentGluing("gluing must identify points of distinct cells");
    }

    // the first generation must come out connected
    auto chain = level_chain(sys, 1);
    if (component_count(chain[1].graph) != 1)
        throw InconsistentGluing("gluing rules leave generation 1 disconnected");
    return sys;
}

PcfSystem preset(const std::string& name) {
    PcfSystem sys;
    if (name == "interval") {
        sys.N = 2;
        sys.N0 = 2;
        sys.theta = Rational(1, 2);
        sys.r = Rational(1, 2);
        sys.gamma0 = {Rational(1)};
        sys.gluings = {{1, 2, 2, 1}};
    } else if (name == "sierpinski") {
        sys.N = 3;
        sys.N0 = 3;
        sys.theta = Rational(1, 2);
        sys.r = Rational(3, 5);
        sys.gamma0 = {Rational(1), Rational(1), Rational(1)};
        sys.gluings = {{1, 2, 2, 1}, {1, 3, 3, 1}, {2, 3, 3, 2}};
    } else {
        throw UnknownPreset("unknown preset '" + name + "' (have: interval, sierpinski)");
    }
    return validate_system(std::move(sys));
}

std::vector<LevelGraph> level_chain(const PcfSystem& sys, int m) {
    if (m < 0) throw ConfigError("generation must be nonnegative");
    std::vector<LevelGraph> chain;
    chain.reserve(m + 1);
    chain.push_back(make_generation0(sys));
    for (int i = 1; i <= m; ++i) chain.push_back(next_generation(sys, chain.back()));
    return chain;
}

LevelGraph level_graph(const PcfSystem& sys, int m) {
    auto chain = level_chain(sys, m);
    return std::move(chain.back());
}

Eigen::VectorXd harmonic_extension(const LevelGraph& coarse, const LevelGraph& fine,
                                   const Eigen::VectorXd& phi) {
    const int nc = coarse.graph.n();
    const int nf = fine.graph.n();
    if (phi.size() != nc) throw DimensionMismatch("phi must live on the coarse vertex set");
    if (static_cast<int>(fine.embed_prev.size()) != nc || fine.m != coarse.m + 1)
        throw DimensionMismatch("levels are not consecutive generations of one chain");

    std::vector<int> interior_index(nf, -1); // -1 marks embedded (fixed) vertices
    std::vector<double> fixed_value(nf, 0.0);
    for (int x = 0; x < nc; ++x) fixed_value[fine.embed_prev[x]] = phi[x];
    std::vector<bool> is_fixed(nf, false);
    for (int x = 0; x < nc; ++x) is_fixed[fine.embed_prev[x]] = true;
    int n_int = 0;
    for (int v = 0; v < nf; ++v)
        if (!is_fixed[v]) interior_index[v] = n_int++;

    Eigen::VectorXd out(nf);
    for (int v = 0; v < nf; ++v) out[v] = is_fixed[v] ? fixed_value[v] : 0.0;
    if (n_int == 0) return out;

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_int);
    for (const auto& e : fine.graph.edges) {
        const bool fu = is_fixed[e.u], fv = is_fixed[e.v];
        if (fu && fv) continue;
        if (!fu && !fv) {
            const int iu = interior_index[e.u], iv = interior_index[e.v];
            trips.emplace_back(iu, iu, e.gamma);
            trips.emplace_back(iv, iv, e.gamma);
            trips.emplace_back(iu, iv, -e.gamma);
            trips.emplace_back(iv, iu, -e.gamma);
        } else {
            const int i = interior_index[fu ? e.v : e.u];
            trips.emplace_back(i, i, e.gamma);
            rhs[i] += e.gamma * fixed_value[fu ? e.u : e.v];
        }
    }
    Eigen::SparseMatrix<double> lii(n_int, n_int);
    lii.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lii);
    if (solver.info() != Eigen::Success)
        throw SingularSystem("interior system of the energy minimizer is singular");
    Eigen::VectorXd sol = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
        throw SingularSystem("interior solve of the energy minimizer failed");
    for (int v = 0; v < nf; ++v)
        if (!is_fixed[v]) out[v] = sol[interior_index[v]];
    return out;
}

Eigen::VectorXd harmonic_extension(const PcfSystem& sys, int m, const Eigen::VectorXd& phi) {
    auto chain = level_chain(sys, m + 1);
    return harmonic_extension(chain[m], chain[m + 1], phi);
}

CompatibilityReport verify_compatibility(const PcfSystem& sys, int m, int trials,
                                         std::uint64_t seed) {
    auto chain = level_chain(sys, m + 1);
    const LevelGraph& coarse = chain[m];
    const LevelGraph& fine = chain[m + 1];
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double inv_r = 1.0 / sys.r.to_double();

    CompatibilityReport rep;
    rep.trials = trials;
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd phi(coarse.graph.n());
        for (int v = 0; v < phi.size(); ++v) phi[v] = unif(rng);
        const double em = energy(coarse.graph, phi);
        const double ef = energy(fine.graph, harmonic_extension(coarse, fine, phi));
        const double dext = std::abs(em - ef) / std::max({std::abs(em), std::abs(ef), 1e-30});
        rep.worst_extension_defect = std::max(rep.worst_extension_defect, dext);

        Eigen::VectorXd f(fine.graph.n());
        for (int v = 0; v < f.size(); ++v) f[v] = unif(rng);
        const double lhs = energy(fine.graph, f);
        double rhs = 0.0;
        Eigen::VectorXd pull(coarse.graph.n());
        for (int j = 0; j < sys.N; ++j) {
            for (int x = 0; x < coarse.graph.n(); ++x) pull[x] = f[fine.cell_vertex[j][x]];
            rhs += inv_r * energy(coarse.graph, pull);
        }
        const double dss = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30});
        rep.worst_selfsimilarity_defect = std::max(rep.worst_selfsimilarity_defect, dss);
    }
    const double tol = 1e-10;
    if (rep.worst_extension_defect > tol)
        throw CompatibilityViolation(
            "energy of the minimizing extension does not match: relative defect " +
            std::to_string(rep.worst_extension_defect));
    if (rep.worst_selfsimilarity_defect > tol)
        throw CompatibilityViolation("self-similar energy decomposition fails: relative defect " +
                                     std::to_string(rep.worst_selfsimilarity_defect));
    rep.passed = true;
    return rep;
}

} // namespace fracspec
