#include "fracspec/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fracspec/errors.hpp"

namespace fracspec {

nlohmann::json graph_to_json(const WeightedGraph& g) {
    nlohmann::json j;
    j["vertices"] = g.vertices;
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges)
        edges.push_back({g.vertices[e.u], g.vertices[e.v], e.gamma});
    auto& mu = j["mu"] = nlohmann::json::object();
    for (int v = 0; v < g.n(); ++v) mu[g.vertices[v]] = g.mu[v];
    return j;
}

nlohmann::json metric_to_json(const MetricGraph& mg) {
    nlohmann::json j = graph_to_json(mg.graph);
    j["lengths"] = mg.length;
    return j;
}

nlohmann::json rate_to_json(const GeometricRate& rate) {
    return {{"mantissa", rate.mantissa.to_string()},
            {"ratio", rate.ratio.to_string()},
            {"mantissa_value", rate.mantissa.to_double()},
            {"ratio_value", rate.ratio.to_double()}};
}

nlohmann::json plan_to_json(const ScalingPlan& plan) {
    const char* tag = plan.tag == ScalingCase::geometric         ? "geometric"
                      : plan.tag == ScalingCase::inverse_weight  ? "inverse-weight"
                      : plan.tag == ScalingCase::unit_tau        ? "unit-tau"
                                                                 : "custom";
    nlohmann::json j;
    j["case"] = tag;
    j["m"] = plan.m;
    j["lambda"] = plan.lambda.to_string();
    j["ell00"] = plan.ell00.to_string();
    j["c_sq"] = plan.c_sq.to_string();
    j["c_sq_value"] = plan.c_sq.to_double();
    j["tau"] = plan.tau.to_string();
    j["tau_value"] = plan.tau_value();
    j["c_sq_rate"] = rate_to_json(plan.c_sq_rate);
    j["tau_rate"] = rate_to_json(plan.tau_rate);
    return j;
}

nlohmann::json manifold_table_to_json(const std::vector<ManifoldCaseRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json j;
        j["case"] = row.label;
        j["lambda"] = row.lambda.to_string();
        j["window"] = {row.window_lo.to_string(), row.window_hi.to_string()};
        j["window_values"] = {row.window_lo.to_double(), row.window_hi.to_double()};
        j["eps_star"] = row.eps_star.to_string();
        j["eps_star_value"] = row.eps_star.to_double();
        j["ell_rate"] = rate_to_json(row.ell_rate);
        j["tau_rate"] = rate_to_json(row.tau_rate);
        j["c_sq_rate"] = rate_to_json(row.c_sq_rate);
        j["delta_sq_rate"] = rate_to_json(row.delta_sq_rate);
        arr.push_back(std::move(j));
    }
    return arr;
}

Rational rational_from_json(const nlohmann::json& j, const std::string& what) {
    if (j.is_string()) {
        auto r = Rational::parse(j.get<std::string>());
        if (!r) throw ConfigError(what + ": cannot parse \"" + j.get<std::string>() + "\"");
        return *r;
    }
    if (j.is_number()) {
        // accept only plainly-intended dyadics (0.5, 0.375, ...): a written
        // 0.6 is the double nearest 3/5, not 3/5, and would silently break
        // the exactness of every derived scaling table
        auto r = Rational::from_double(j.get<double>());
        if (!r || r->den() > (1 << 20))
            throw ConfigError(what + ": " + j.dump() +
                              " is not exact as a double; write it as \"p/q\"");
        return *r;
    }
    throw ConfigError(what + ": expected a number or a \"p/q\" string, got " + j.dump());
}

PcfSystem pcf_system_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("system description must be a JSON object");
    for (const char* key : {"N", "N0", "theta", "r", "gamma0", "gluing"})
        if (!j.contains(key)) throw ConfigError(std::string("system description misses \"") + key + "\"");

    PcfSystem sys;
    if (!j["N"].is_number_integer() || !j["N0"].is_number_integer())
        throw ConfigError("N and N0 must be integers");
    sys.N = j["N"].get<int>();
    sys.N0 = j["N0"].get<int>();
    sys.theta = rational_from_json(j["theta"], "theta");
    sys.r = rational_from_json(j["r"], "r");
    if (!j["gamma0"].is_array()) throw ConfigError("gamma0 must be an array");
    for (size_t i = 0; i < j["gamma0"].size(); ++i)
        sys.gamma0.push_back(rational_from_json(j["gamma0"][i], "gamma0[" + std::to_string(i) + "]"));
    if (!j["gluing"].is_array()) throw ConfigError("gluing must be an array");
    for (const auto& g : j["gluing"]) {
        if (!g.is_array() || g.size() != 4)
            throw ConfigError("each gluing rule must be [cell, point, cell, point]");
        for (const auto& c : g)
            if (!c.is_number_integer()) throw ConfigError("gluing entries must be integers");
        sys.gluings.push_back({g[0].get<int>(), g[1].get<int>(), g[2].get<int>(), g[3].get<int>()});
    }
    return validate_system(std::move(sys));
}

PcfSystem load_pcf_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return pcf_system_from_json(j);
}

void write_text_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace fracspec
