#include "fracspec/weighted_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "fracspec/errors.hpp"
#include "fracspec/spectra.hpp"

namespace fracspec {

int WeightedGraph::index_of(const std::string& id) const {
    for (int i = 0; i < n(); ++i)
        if (vertices[i] == id) return i;
    return -1;
}

namespace {

void finalize(WeightedGraph& g) {
    const int n = g.n();
    std::set<std::pair<int, int>> seen;
    g.incident.assign(n, {});
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        const auto& edge = g.edges[e];
        if (edge.u < 0 || edge.u >= n || edge.v < 0 || edge.v >= n)
            throw ConfigError("edge endpoint out of range");
        if (edge.u == edge.v)
            throw LoopEdge("loop edge at vertex '" + g.vertices[edge.u] + "'");
        if (!(edge.gamma > 0.0))
            throw NonPositiveWeight("edge weight must be positive, got " + std::to_string(edge.gamma));
        auto key = std::minmax(edge.u, edge.v);
        if (!seen.insert(key).second)
            throw DuplicateEdge("duplicate edge between '" + g.vertices[edge.u] + "' and '" +
                                g.vertices[edge.v] + "'");
        g.incident[edge.u].push_back(e);
        g.incident[edge.v].push_back(e);
    }
    for (int v = 0; v < n; ++v)
        if (!(g.mu[v] > 0.0))
            throw NonPositiveWeight("vertex weight must be positive at '" + g.vertices[v] + "'");
}

} // namespace

WeightedGraph build_graph(const std::vector<std::string>& vertices,
                          const std::vector<std::tuple<std::string, std::string, double>>& edges,
                          const std::map<std::string, double>& mu) {
    WeightedGraph g;
    g.vertices = vertices;
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(vertices.size()); ++i)
        if (!index.emplace(vertices[i], i).second)
            throw ConfigError("duplicate vertex id '" + vertices[i] + "'");
    g.edges.reserve(edges.size());
    for (const auto& [u, v, gamma] : edges) {
        auto iu = index.find(u);
        auto iv = index.find(v);
        if (iu == index.end() || iv == index.end())
            throw ConfigError("edge references unknown vertex '" + (iu == index.end() ? u : v) + "'");
        g.edges.push_back({iu->second, iv->second, gamma});
    }
    g.mu.resize(vertices.size());
    for (int i = 0; i < static_cast<int>(vertices.size()); ++i) {
        auto it = mu.find(vertices[i]);
        if (it == mu.end()) throw ConfigError("missing mu for vertex '" + vertices[i] + "'");
        g.mu[i] = it->second;
    }
    if (mu.size() != vertices.size()) throw ConfigError("mu defined for unknown vertices");
    finalize(g);
    return g;
}

WeightedGraph build_graph_indexed(std::vector<std::string> vertices,
                                  std::vector<WeightedGraph::Edge> edges,
                                  std::vector<double> mu) {
    WeightedGraph g;
    g.vertices = std::move(vertices);
    g.edges = std::move(edges);
    g.mu = std::move(mu);
    if (g.mu.size() != g.vertices.size()) throw ConfigError("mu size does not match vertex count");
    finalize(g);
    return g;
}

double energy(const WeightedGraph& g, const Eigen::VectorXd& f) {
    double total = 0.0;
    for (const auto& e : g.edges) {
        const double d = f[e.v] - f[e.u];
        total += e.gamma * d * d;
    }
    return total;
}

double energy(const WeightedGraph& g, const Eigen::VectorXcd& f) {
    double total = 0.0;
    for (const auto& e : g.edges)
        total += e.gamma * std::norm(f[e.v] - f[e.u]);
    return total;
}

double energy_bilinear(const WeightedGraph& g, const Eigen::VectorXd& f, const Eigen::VectorXd& h) {
    double total = 0.0;
    for (const auto& e : g.edges)
        total += e.gamma * (f[e.v] - f[e.u]) * (h[e.v] - h[e.u]);
    return total;
}

LaplacianPair laplacian(const WeightedGraph& g) {
    const int n = g.n();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(4 * g.edges.size());
    for (const auto& e : g.edges) {
        trips.emplace_back(e.u, e.u, e.gamma);
        trips.emplace_back(e.v, e.v, e.gamma);
        trips.emplace_back(e.u, e.v, -e.gamma);
        trips.emplace_back(e.v, e.u, -e.gamma);
    }
    LaplacianPair out;
    out.L.resize(n, n);
    out.L.setFromTriplets(trips.begin(), trips.end());
    out.L.makeCompressed();
    out.M = Eigen::Map<const Eigen::VectorXd>(g.mu.data(), n);
    return out;
}

Eigen::VectorXcd apply_laplacian(const WeightedGraph& g, const Eigen::VectorXcd& f) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(g.n());
    for (const auto& e : g.edges) {
        const std::complex<double> d = f[e.u] - f[e.v];
        out[e.u] += e.gamma * d;
        out[e.v] -= e.gamma * d;
    }
    for (int v = 0; v < g.n(); ++v) out[v] /= g.mu[v];
    return out;
}

Eigen::VectorXd apply_laplacian(const WeightedGraph& g, const Eigen::VectorXd& f) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n());
    for (const auto& e : g.edges) {
        const double d = f[e.u] - f[e.v];
        out[e.u] += e.gamma * d;
        out[e.v] -= e.gamma * d;
    }
    for (int v = 0; v < g.n(); ++v) out[v] /= g.mu[v];
    return out;
}

std::vector<double> spectrum(const WeightedGraph& g, const SpectrumOptions& opts) {
    auto [L, M] = laplacian(g);
    const GraphStats st = stats(g);
    std::vector<double> out;
    if (opts.use_iterative) {
        const int k = opts.k > 0 ? opts.k : g.n();
        Eigen::SparseMatrix<double> B(g.n(), g.n());
        std::vector<Eigen::Triplet<double>> trips;
        for (int i = 0; i < g.n(); ++i) trips.emplace_back(i, i, M[i]);
        B.setFromTriplets(trips.begin(), trips.end());
        // shift scaled to the spectral width so the factorization stays well
        // conditioned near the kernel
        out = smallest_eigenvalues_lanczos(L, B, k, 0.1 * std::max(st.rho_max, 1.0));
    } else {
        Eigen::VectorXd evs = generalized_eigenvalues_dense(L, M);
        out.assign(evs.data(), evs.data() + evs.size());
        if (opts.k > 0 && opts.k < static_cast<int>(out.size())) out.resize(opts.k);
    }
    snap_kernel(out, 1e-10 * st.rho_max);
    std::sort(out.begin(), out.end());
    return out;
}

GraphStats stats(const WeightedGraph& g) {
    GraphStats s;
    if (g.n() == 0) return s;
    s.mu_min = s.mu_max = g.mu[0];
    for (double m : g.mu) {
        s.mu_min = std::min(s.mu_min, m);
        s.mu_max = std::max(s.mu_max, m);
    }
    if (!g.edges.empty()) {
        s.gamma_min = s.gamma_max = g.edges[0].gamma;
        for (const auto& e : g.edges) {
            s.gamma_min = std::min(s.gamma_min, e.gamma);
            s.gamma_max = std::max(s.gamma_max, e.gamma);
        }
    }
    s.rho_min = std::numeric_limits<double>::infinity();
    s.rho_max = 0.0;
    for (int v = 0; v < g.n(); ++v) {
        s.d_max = std::max(s.d_max, g.degree(v));
        double gsum = 0.0;
        for (int e : g.incident[v]) gsum += g.edges[e].gamma;
        const double rho = gsum / g.mu[v];
        s.rho_min = std::min(s.rho_min, rho);
        s.rho_max = std::max(s.rho_max, rho);
    }
    s.c_mu = s.mu_max / s.mu_min;
    s.c_gamma = s.gamma_max > 0 ? s.gamma_max / s.gamma_min : 0.0;
    s.max_inv_rel_weight = s.gamma_min > 0 ? s.mu_max / s.gamma_min : 0.0;

    // relative-weight sandwich: gamma_min/mu_max <= rho <= d_max*gamma_max/mu_min
    // and its reciprocal form; violations would mean the statistics above are
    // internally inconsistent.
    if (!g.edges.empty() && g.n() > 0 && s.rho_min > 0) {
        const double slack = 1.0 + 1e-12;
        const double lower = s.gamma_min / s.mu_max;
        const double upper = s.d_max * s.gamma_max / s.mu_min;
        if (s.rho_min * slack < lower || s.rho_max > upper * slack)
            throw NumericalError("relative-weight bounds violated");
        const double inv_lower = s.max_inv_rel_weight / (s.c_gamma * s.d_max * s.c_mu);
        if (1.0 / s.rho_min > s.max_inv_rel_weight * slack ||
            (1.0 / s.rho_max) * slack < inv_lower)
            throw NumericalError("inverse relative-weight bounds violated");
    }
    return s;
}

int component_count(const WeightedGraph& g) {
    const int n = g.n();
    std::vector<int> label(n, -1);
    int comps = 0;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        label[s] = comps;
        stack.push_back(s);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int e : g.incident[v]) {
                int w = g.edges[e].u == v ? g.edges[e].v : g.edges[e].u;
                if (label[w] < 0) {
                    label[w] = comps;
                    stack.push_back(w);
                }
            }
        }
        ++comps;
    }
    return comps;
}

} // namespace fracspec
