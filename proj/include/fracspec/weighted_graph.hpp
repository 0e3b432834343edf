#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fracspec {

/// Finite simple graph with vertex weights mu (mass) and edge weights gamma
/// (conductance). Carrier of the discrete energy form
///   energy(f) = sum_e gamma_e |f(head) - f(tail)|^2
/// on l2(V, mu). Immutable after construction.
struct WeightedGraph {
    struct Edge {
        int u = -1;
        int v = -1;
        double gamma = 0.0;
    };

    std::vector<std::string> vertices; // ids, input order preserved
    std::vector<Edge> edges;
    std::vector<double> mu;

    // vertex -> incident edge indices (built by build_graph)
    std::vector<std::vector<int>> incident;

    int n() const { return static_cast<int>(vertices.size()); }
    int degree(int v) const { return static_cast<int>(incident[v].size()); }
    int index_of(const std::string& id) const; // -1 when absent
};

/// Uniformity statistics of a weighted graph; these drive every error
/// estimate downstream. rho(v) = (sum of incident gamma) / mu(v).
struct GraphStats {
    double mu_min = 0.0, mu_max = 0.0;       // inf/sup of mu
    double gamma_min = 0.0, gamma_max = 0.0; // inf/sup of gamma
    int d_max = 0;                           // max degree
    double rho_min = 0.0, rho_max = 0.0;     // inf/sup of relative weight
    double c_mu = 0.0;                       // mu_max / mu_min
    double c_gamma = 0.0;                    // gamma_max / gamma_min
    double max_inv_rel_weight = 0.0;         // mu_max / gamma_min
};

/// Validates and assembles a graph. Vertex order is kept as given; edges
/// reference vertices by id. Throws LoopEdge, DuplicateEdge,
/// NonPositiveWeight, ConfigError (unknown ids, size mismatches).
WeightedGraph build_graph(const std::vector<std::string>& vertices,
                          const std::vector<std::tuple<std::string, std::string, double>>& edges,
                          const std::map<std::string, double>& mu);

/// Index-based variant for callers that already hold a consistent layout
/// (level-graph construction, subdivision). Same validation.
WeightedGraph build_graph_indexed(std::vector<std::string> vertices,
                                  std::vector<WeightedGraph::Edge> edges,
                                  std::vector<double> mu);

/// Quadratic energy form. Zero exactly on functions constant on every
/// connected component.
double energy(const WeightedGraph& g, const Eigen::VectorXd& f);
double energy(const WeightedGraph& g, const Eigen::VectorXcd& f);

/// Bilinear form energy(f, h) = sum_e gamma_e (df)_e (dh)_e (real).
double energy_bilinear(const WeightedGraph& g, const Eigen::VectorXd& f, const Eigen::VectorXd& h);

/// The pair (L, M): L the conductance Laplacian (f^T L f = energy(f)),
/// M = diag(mu). The operator itself is Delta = M^{-1} L, self-adjoint in
/// l2(V, mu) with 0 <= Delta <= 2 rho_max.
struct LaplacianPair {
    Eigen::SparseMatrix<double> L;
    Eigen::VectorXd M;
};
LaplacianPair laplacian(const WeightedGraph& g);

/// Delta f = M^{-1} L f, complex-capable.
Eigen::VectorXcd apply_laplacian(const WeightedGraph& g, const Eigen::VectorXcd& f);
Eigen::VectorXd apply_laplacian(const WeightedGraph& g, const Eigen::VectorXd& f);

struct SpectrumOptions {
    bool use_iterative = false; // shift-invert Lanczos instead of dense
    int k = -1;                 // eigenvalue count for the iterative path; -1 = all (dense only)
};

/// Eigenvalues of L x = lambda M x, ascending, each >= 0. Values below
/// 1e-10 * rho_max snap to exactly 0 so component counting is exact.
std::vector<double> spectrum(const WeightedGraph& g, const SpectrumOptions& opts = {});

/// Computes all uniformity statistics and verifies the relative-weight
/// sandwich bounds they must satisfy.
GraphStats stats(const WeightedGraph& g);

/// Number of connected components.
int component_count(const WeightedGraph& g);

} // namespace fracspec
