#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracspec/rational.hpp"
#include "fracspec/weighted_graph.hpp"

namespace fracspec {

/// One identification rule: cell j's copy of boundary point a coincides
/// with cell j2's copy of boundary point b. Cells and boundary points are
/// 1-based here, matching the on-disk config format.
struct Gluing {
    int j = 0;
    int a = 0;
    int j2 = 0;
    int b = 0;
};

/// Combinatorial description of a self-similar system: N cells, N0 boundary
/// points, similitude factor theta (lengths), energy renormalization r, and
/// the generation-0 conductances gamma0 on the complete graph over the
/// boundary (edges in lexicographic pair order). All exact rationals, so the
/// derived scaling sequences stay exact.
struct PcfSystem {
    int N = 0;
    int N0 = 0;
    Rational theta;
    Rational r;
    std::vector<Rational> gamma0;
    std::vector<Gluing> gluings;

    // derived by validate_system
    Rational C0;       // sum of 1/gamma0 over the edges at any boundary vertex
    Rational C1, C2;   // min / max of gamma0

    int edge_count0() const { return N0 * (N0 - 1) / 2; }
};

/// Lexicographic index of the unordered boundary pair {a, b} (1-based) in
/// the edge list of the complete graph on N0 vertices.
int boundary_edge_index(int N0, int a, int b);

/// Checks every structural invariant (ranges, boundary symmetry constant,
/// gluing sanity), fills the derived constants, and returns the system.
/// Throws ConfigError with a precise message on any violation.
PcfSystem validate_system(PcfSystem sys);

/// Built-in systems: "interval" (N=2, r=1/2) and "sierpinski" (N=3, r=3/5).
/// Throws UnknownPreset otherwise.
PcfSystem preset(const std::string& name);

/// One generation of the approximating graph sequence. Vertex ids are the
/// canonical addresses "j1.j2.....jm:a" (lexicographically smallest among
/// all identified copies); vertex order is address order.
struct LevelGraph {
    int m = 0;
    WeightedGraph graph;
    std::vector<std::int64_t> card; // per vertex: number of (word, boundary) copies
    std::vector<int> ancestor;      // per edge: generation-0 edge it replicates

    // canonical address, split into cell word and boundary index
    std::vector<std::vector<int>> address_word;
    std::vector<int> address_boundary;

    // chain bookkeeping (all empty at m = 0):
    // cell_vertex[j-1][x] = index here of cell j's copy of previous-level vertex x
    std::vector<std::vector<int>> cell_vertex;
    // embed_prev[x] = index here of previous-level vertex x (same point)
    std::vector<int> embed_prev;
    // boundary_pos[a-1] = index here of the fixed point q_a
    std::vector<int> boundary_pos;
    // canonical candidate of each vertex: cell (1-based) and previous-level index
    std::vector<int> canon_cell;
    std::vector<int> canon_prev;
};

/// Builds generations 0..m. Throws InconsistentGluing when the rules
/// produce loops, parallel edges, or a disconnected first generation.
std::vector<LevelGraph> level_chain(const PcfSystem& sys, int m);

/// Convenience wrapper returning only generation m.
LevelGraph level_graph(const PcfSystem& sys, int m);

/// Energy-minimizing extension of phi on V_m to V_{m+1} (values at embedded
/// vertices are kept exactly). `coarse` and `fine` must be consecutive
/// entries of a level_chain. Throws SingularSystem if the interior solve
/// fails (cannot happen on connected levels; defensive).
Eigen::VectorXd harmonic_extension(const LevelGraph& coarse, const LevelGraph& fine,
                                   const Eigen::VectorXd& phi);

/// Convenience form: builds the level chain internally.
Eigen::VectorXd harmonic_extension(const PcfSystem& sys, int m, const Eigen::VectorXd& phi);

struct CompatibilityReport {
    int trials = 0;
    double worst_extension_defect = 0.0;  // |e_m(phi) - e_{m+1}(ext phi)| relative
    double worst_selfsimilarity_defect = 0.0;
    bool passed = false;
};

/// Monte-Carlo check of the two structural energy identities:
///   e_m(phi) = e_{m+1}(harmonic_extension(phi))        (compatibility)
///   e_{m+1}(f) = (1/r) * sum_j e_m(f restricted to cell j)  (self-similarity)
/// Relative tolerance 1e-10. Throws CompatibilityViolation carrying the
/// worst defect when either identity fails; returns the report otherwise.
CompatibilityReport verify_compatibility(const PcfSystem& sys, int m, int trials,
                                         std::uint64_t seed = 0x5eed5eed);

} // namespace fracspec
