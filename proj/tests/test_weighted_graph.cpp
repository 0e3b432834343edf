#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fracspec/errors.hpp"
#include "fracspec/weighted_graph.hpp"
#include "support/oracles.hpp"

using namespace fracspec;

namespace {

WeightedGraph triangle_third() {
    // complete graph on three vertices, unit conductances, mu = 1/3
    return build_graph({"a", "b", "c"},
                       {{"a", "b", 1.0}, {"a", "c", 1.0}, {"b", "c", 1.0}},
                       {{"a", 1.0 / 3}, {"b", 1.0 / 3}, {"c", 1.0 / 3}});
}

WeightedGraph random_graph(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> size(2, 12);
    std::uniform_real_distribution<double> weight(0.1, 10.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const int n = size(rng);
    std::vector<std::string> ids;
    std::vector<double> mu;
    for (int i = 0; i < n; ++i) {
        ids.push_back("v" + std::to_string(i));
        mu.push_back(weight(rng));
    }
    std::vector<WeightedGraph::Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (j == i + 1 || coin(rng) < 0.3) // keep it connected via the path
                edges.push_back({i, j, weight(rng)});
    return build_graph_indexed(ids, edges, mu);
}

} // namespace

TEST_CASE("construction validates input") {
    CHECK_THROWS_AS(build_graph({"a"}, {{"a", "a", 1.0}}, {{"a", 1.0}}), LoopEdge);
    CHECK_THROWS_AS(build_graph({"a", "b"}, {{"a", "b", 1.0}, {"b", "a", 2.0}}, {{"a", 1.0}, {"b", 1.0}}),
                    DuplicateEdge);
    CHECK_THROWS_AS(build_graph({"a", "b"}, {{"a", "b", 0.0}}, {{"a", 1.0}, {"b", 1.0}}),
                    NonPositiveWeight);
    CHECK_THROWS_AS(build_graph({"a", "b"}, {{"a", "b", -2.0}}, {{"a", 1.0}, {"b", 1.0}}),
                    NonPositiveWeight);
    CHECK_THROWS_AS(build_graph({"a", "b"}, {{"a", "b", 1.0}}, {{"a", 1.0}, {"b", 0.0}}),
                    NonPositiveWeight);
    CHECK_THROWS_AS(build_graph({"a", "b"}, {{"a", "c", 1.0}}, {{"a", 1.0}, {"b", 1.0}}), ConfigError);
    CHECK_THROWS_AS(build_graph({"a", "b"}, {{"a", "b", 1.0}}, {{"a", 1.0}}), ConfigError);
    CHECK_THROWS_AS(build_graph({"a", "a"}, {}, {{"a", 1.0}}), ConfigError);

    auto g = triangle_third();
    CHECK(g.n() == 3);
    CHECK(g.degree(0) == 2);
    CHECK(g.index_of("c") == 2);
    CHECK(g.index_of("zz") == -1);
}

TEST_CASE("energy on known functions") {
    auto g = triangle_third();
    Eigen::VectorXd f(3);
    f << 1.0, 0.0, 0.0;
    CHECK(energy(g, f) == doctest::Approx(2.0).epsilon(1e-15)); // two unit edges see the jump

    // two-edge path, gamma = 4, f = (0, 1, 2): 4*1 + 4*1 = 8
    auto p = build_graph({"x", "y", "z"}, {{"x", "y", 4.0}, {"y", "z", 4.0}},
                         {{"x", 1.0}, {"y", 1.0}, {"z", 1.0}});
    Eigen::VectorXd h(3);
    h << 0.0, 1.0, 2.0;
    CHECK(energy(p, h) == doctest::Approx(8.0).epsilon(1e-15));

    Eigen::VectorXd c = Eigen::VectorXd::Constant(3, 5.0);
    CHECK(energy(p, c) == 0.0);

    Eigen::VectorXcd fc(3);
    fc << std::complex<double>(0, 1), std::complex<double>(0, 0), std::complex<double>(0, 0);
    CHECK(energy(g, fc) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("spectrum of frozen examples") {
    // triangle with mu = 1/3: Laplacian eigenvalues {0, 3, 3}, pencil scales by 3
    auto spec = spectrum(triangle_third());
    REQUIRE(spec.size() == 3);
    CHECK(spec[0] == 0.0);
    CHECK(spec[1] == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(spec[2] == doctest::Approx(9.0).epsilon(1e-12));

    // standardized interval chain at level 1: path on 3 vertices,
    // mu = (1/4, 1/2, 1/4), gamma = 2, eigenvalues {0, 8, 16}
    auto p = build_graph({"0", "h", "1"}, {{"0", "h", 2.0}, {"h", "1", 2.0}},
                         {{"0", 0.25}, {"h", 0.5}, {"1", 0.25}});
    auto pspec = spectrum(p);
    REQUIRE(pspec.size() == 3);
    auto oracle = oracles::interval_level_spectrum(1);
    for (int k = 0; k < 3; ++k)
        CHECK(pspec[k] == doctest::Approx(oracle[k]).epsilon(1e-12));
}

TEST_CASE("laplacian matches energy and operator identities") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = random_graph(rng);
        Eigen::VectorXd f = Eigen::VectorXd::Random(g.n());
        Eigen::VectorXd h = Eigen::VectorXd::Random(g.n());

        // energy(f) = <f, Delta f>_mu
        Eigen::VectorXd lf = apply_laplacian(g, f);
        double inner = 0.0;
        for (int v = 0; v < g.n(); ++v) inner += f[v] * lf[v] * g.mu[v];
        CHECK(energy(g, f) == doctest::Approx(inner).epsilon(1e-11));

        // bilinear form polarization
        CHECK(energy_bilinear(g, f, h) ==
              doctest::Approx(0.25 * (energy(g, Eigen::VectorXd(f + h)) -
                                      energy(g, Eigen::VectorXd(f - h))))
                  .epsilon(1e-10));

        // matrix pair agrees with the matrix-free application
        auto [L, M] = laplacian(g);
        Eigen::VectorXd lf2 = (L * f).cwiseQuotient(M);
        CHECK((lf - lf2).lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + lf.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("operator norm bound and stats invariants") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = random_graph(rng);
        auto st = stats(g); // stats() itself cross-checks the sandwich bounds
        auto spec = spectrum(g);
        CHECK(spec.back() <= 2.0 * st.rho_max * (1.0 + 1e-12));
        CHECK(spec.front() == 0.0);
        CHECK(st.c_mu >= 1.0);
        CHECK(st.c_gamma >= 1.0);
    }

    auto st = stats(triangle_third());
    CHECK(st.d_max == 2);
    CHECK(st.rho_min == doctest::Approx(6.0));
    CHECK(st.rho_max == doctest::Approx(6.0));
    CHECK(st.max_inv_rel_weight == doctest::Approx(1.0 / 3));
}

TEST_CASE("spectrum is invariant under consistent rescaling checks") {
    // multiplying all gamma and all mu by the same factor leaves Delta fixed
    std::mt19937_64 rng(1234);
    auto g = random_graph(rng);
    auto scaled_edges = g.edges;
    for (auto& e : scaled_edges) e.gamma *= 7.5;
    auto scaled_mu = g.mu;
    for (auto& m : scaled_mu) m *= 7.5;
    auto gs = build_graph_indexed(g.vertices, scaled_edges, scaled_mu);
    auto a = spectrum(g);
    auto b = spectrum(gs);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i)
        CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-10));
}

TEST_CASE("iterative spectrum path agrees with dense") {
    std::mt19937_64 rng(555);
    for (int trial = 0; trial < 5; ++trial) {
        auto g = random_graph(rng);
        auto dense = spectrum(g);
        const int k = std::min<int>(4, g.n());
        auto it = spectrum(g, {.use_iterative = true, .k = k});
        REQUIRE(static_cast<int>(it.size()) >= k);
        for (int i = 0; i < k; ++i)
            CHECK(it[i] == doctest::Approx(dense[i]).epsilon(1e-8));
    }
}

TEST_CASE("component counting") {
    auto g = build_graph({"a", "b", "c", "d"}, {{"a", "b", 1.0}, {"c", "d", 1.0}},
                         {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"d", 1.0}});
    CHECK(component_count(g) == 2);
    auto spec = spectrum(g);
    CHECK(spec[0] == 0.0);
    CHECK(spec[1] == 0.0); // kernel dimension = component count
    CHECK(spec[2] > 0.0);
    CHECK(component_count(triangle_third()) == 1);
}
