#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fracspec/cli_commands.hpp"
#include "fracspec/errors.hpp"
#include "fracspec/json_io.hpp"
#include "fracspec/pcf_system.hpp"

using namespace fracspec;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("fracspec_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("config validation") {
    RunConfig cfg;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError); // no source
    cfg.preset_name = "interval";
    cfg.config_path = "also.json";
    CHECK_THROWS_AS(validate_config(cfg), ConfigError); // two sources
    cfg.config_path.clear();
    CHECK_NOTHROW(validate_config(cfg));

    cfg.m_lo = 3;
    cfg.m_hi = 1;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.m_lo = -1;
    cfg.m_hi = 2;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.m_lo = 0;
    cfg.k = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.k = 4;
    cfg.h_target = -0.5;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.h_target = 0.0;
    cfg.custom_ratio = true; // lambda defaults to zero
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.lambda = SqrtRational(Rational(1, 2));
    CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("exact numbers in JSON") {
    CHECK(rational_from_json(nlohmann::json(0.5), "x") == Rational(1, 2));
    CHECK(rational_from_json(nlohmann::json("3/5"), "x") == Rational(3, 5));
    CHECK(rational_from_json(nlohmann::json(7), "x") == Rational(7));
    CHECK_THROWS_AS(rational_from_json(nlohmann::json(0.6), "x"), ConfigError);
    CHECK_THROWS_AS(rational_from_json(nlohmann::json("3//5"), "x"), ConfigError);
    CHECK_THROWS_AS(rational_from_json(nlohmann::json(nullptr), "x"), ConfigError);
}

TEST_CASE("system descriptions round-trip through files") {
    auto dir = fresh_dir("sysio");
    const std::string text =
        R"({"N":3,"N0":3,"theta":"1/2","r":"3/5","gamma0":[1,1,1],)"
        R"("gluing":[[1,2,2,1],[2,3,3,2],[1,3,3,1]]})";
    write_text_atomic((dir / "tri.json").string(), text);
    auto sys = load_pcf_system((dir / "tri.json").string());
    CHECK(sys.N == 3);
    CHECK(sys.r == Rational(3, 5));
    CHECK(sys.C0 == preset("sierpinski").C0);

    // same combinatorics as the builtin: identical level graphs
    auto a = level_graph(sys, 2);
    auto b = level_graph(preset("sierpinski"), 2);
    CHECK(a.graph.vertices == b.graph.vertices);

    CHECK_THROWS_AS(load_pcf_system((dir / "missing.json").string()), ConfigError);
    write_text_atomic((dir / "bad.json").string(), "{not json");
    CHECK_THROWS_AS(load_pcf_system((dir / "bad.json").string()), ConfigError);
    write_text_atomic((dir / "incomplete.json").string(), R"({"N":3})");
    CHECK_THROWS_AS(load_pcf_system((dir / "incomplete.json").string()), ConfigError);
    write_text_atomic((dir / "badglue.json").string(),
                      R"({"N":2,"N0":2,"theta":"1/2","r":"1/2","gamma0":[1],"gluing":[[1,2]]})");
    CHECK_THROWS_AS(load_pcf_system((dir / "badglue.json").string()), ConfigError);
}

TEST_CASE("graph serialization carries weights and lengths") {
    auto g = build_graph({"a", "b"}, {{"a", "b", 2.0}}, {{"a", 0.25}, {"b", 0.75}});
    auto j = graph_to_json(g);
    CHECK(j["vertices"] == nlohmann::json({"a", "b"}));
    CHECK(j["edges"][0] == nlohmann::json({"a", "b", 2.0}));
    CHECK(j["mu"]["b"].get<double>() == 0.75);

    auto mj = metric_to_json(make_metric(g, {1.5}));
    CHECK(mj["lengths"] == nlohmann::json({1.5}));
}

TEST_CASE("formatting is reproducible and lossless") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.08) == "1.0800000000000001");
    const double third = 1.0 / 3.0;
    CHECK(std::stod(format_double(third)) == third);
    CHECK(format_double(0.0) == "0");
}

TEST_CASE("generation files") {
    auto dir = fresh_dir("gen");
    RunConfig cfg;
    cfg.preset_name = "sierpinski";
    cfg.m_lo = 0;
    cfg.m_hi = 3;
    cfg.out_dir = dir.string();
    CHECK(cmd_generate(cfg) == 0);

    const int want_vertices[] = {3, 6, 15, 42};
    for (int m = 0; m <= 3; ++m) {
        auto g = nlohmann::json::parse(slurp(dir / ("graph_m" + std::to_string(m) + ".json")));
        CHECK(static_cast<int>(g["vertices"].size()) == want_vertices[m]);
        auto mg = nlohmann::json::parse(slurp(dir / ("metric_m" + std::to_string(m) + ".json")));
        CHECK(mg["lengths"].size() == g["edges"].size());
        auto plan = nlohmann::json::parse(slurp(dir / ("plan_m" + std::to_string(m) + ".json")));
        CHECK(plan["m"].get<int>() == m);
        CHECK(plan["case"] == "geometric");
    }

    // a path graph: interval generation 2 has 5 vertices
    RunConfig icfg;
    icfg.preset_name = "interval";
    icfg.m_lo = icfg.m_hi = 2;
    icfg.out_dir = (dir / "ivl").string();
    CHECK(cmd_generate(icfg) == 0);
    auto g2 = nlohmann::json::parse(slurp(dir / "ivl" / "graph_m2.json"));
    CHECK(g2["vertices"].size() == 5);

    // rerun into a second directory: byte-identical artifacts
    RunConfig again = cfg;
    again.out_dir = (dir / "again").string();
    CHECK(cmd_generate(again) == 0);
    for (int m = 0; m <= 3; ++m) {
        const std::string name = "graph_m" + std::to_string(m) + ".json";
        CHECK(slurp(dir / name) == slurp(dir / "again" / name));
    }
}

TEST_CASE("convergence artifacts") {
    auto dir = fresh_dir("conv");
    RunConfig cfg;
    cfg.preset_name = "interval";
    cfg.m_lo = 1;
    cfg.m_hi = 3;
    cfg.k = 4;
    cfg.assert_bounds = true;
    cfg.out_dir = dir.string();
    cfg.threads = 1;
    CHECK(cmd_converge(cfg) == 0); // bounds hold, so --assert still exits 0

    auto rep = nlohmann::json::parse(slurp(dir / "que_m2.json"));
    CHECK(rep["transitivity_estimate_flagged"].get<bool>() == true);
    CHECK(rep["defects"]["jpj"].get<double>() > 0.0);

    const std::string conv = slurp(dir / "convergence.csv");
    CHECK(conv.rfind("m,delta_theory,", 0) == 0);
    CHECK(std::count(conv.begin(), conv.end(), '\n') == 4); // header + 3 generations

    // m=1 has only 3 vertices, so its table is truncated to 3 rows
    const std::string spectra = slurp(dir / "spectra.csv");
    CHECK(std::count(spectra.begin(), spectra.end(), '\n') == 1 + 3 + 4 + 4);

    // fitted rates cover the k shared by every generation: k = 2..3
    const std::string rates = slurp(dir / "rates.csv");
    CHECK(std::count(rates.begin(), rates.end(), '\n') == 1 + 2);

    // the per-k fitted ratios sit near the squared-distance rate 1/4
    auto second_field = [&](const std::string& line_start) {
        auto pos = rates.find(line_start);
        REQUIRE(pos != std::string::npos);
        auto comma = rates.find(',', pos);
        return std::stod(rates.substr(comma + 1));
    };
    CHECK(second_field("2,") == doctest::Approx(0.25).epsilon(0.35));

    // a parallel run produces the same bytes
    RunConfig par = cfg;
    par.out_dir = (dir / "par").string();
    par.threads = 3;
    CHECK(cmd_converge(par) == 0);
    for (const char* name : {"convergence.csv", "spectra.csv", "rates.csv", "que_m1.json"})
        CHECK(slurp(dir / name) == slurp(dir / "par" / name));
}

TEST_CASE("scaling-case table artifacts") {
    auto dir = fresh_dir("mfd");
    RunConfig cfg;
    cfg.preset_name = "sierpinski";
    cfg.out_dir = dir.string();
    CHECK(cmd_mfd_params(cfg) == 0);

    auto rows = nlohmann::json::parse(slurp(dir / "mfd_params.json"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0]["eps_star"] == "1/10*sqrt(5)");
    CHECK(rows[0]["window"] == nlohmann::json({"1/10", "1/2"}));
    CHECK(rows[1]["tau_rate"]["ratio"] == "9/5");
    CHECK(rows[2]["eps_star"] == "1/5");
    CHECK(rows[2]["tau_rate"]["ratio"] == "1");
}
