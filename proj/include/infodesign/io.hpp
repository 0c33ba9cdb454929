#pragma once

#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "infodesign/errors.hpp"
#include "infodesign/mechanism.hpp"
#include "infodesign/network.hpp"
#include "infodesign/optimizer.hpp"
#include "infodesign/prior.hpp"

namespace infodesign {

using json = nlohmann::ordered_json;

inline std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

namespace detail {

inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

inline double num(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    if (!j[key].is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    return j[key].get<double>();
}

}  // namespace detail

inline Prior parse_prior(const json& j) {
    detail::reject_unknown_keys(j, {"kind", "support", "params"}, "prior");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("prior: missing string key 'kind'");
    if (!j.contains("support") || !j["support"].is_array() || j["support"].size() != 2)
        throw ConfigError("prior: 'support' must be [lo, hi]");
    double lo = j["support"][0].get<double>(), hi = j["support"][1].get<double>();
    json params = j.contains("params") ? j["params"] : json::object();
    std::string kind = j["kind"].get<std::string>();
    const double stol = 1e-9 * std::max(1.0, std::abs(hi - lo));

    if (kind == "uniform") {
        detail::reject_unknown_keys(params, {}, "prior.params");
        return Prior::uniform(lo, hi);
    }
    if (kind == "truncated-gaussian") {
        detail::reject_unknown_keys(params, {"mu", "sigma"}, "prior.params");
        return Prior::truncated_gaussian(detail::num(params, "mu", "prior.params"),
                                         detail::num(params, "sigma", "prior.params"), lo, hi);
    }
    if (kind == "finite-mixture-of-uniforms") {
        detail::reject_unknown_keys(params, {"components"}, "prior.params");
        if (!params.contains("components") || !params["components"].is_array())
            throw ConfigError("prior.params: 'components' array required");
        std::vector<Prior::UniformComponent> comps;
        for (const auto& c : params["components"]) {
            detail::reject_unknown_keys(c, {"weight", "lo", "hi"}, "prior component");
            comps.push_back({detail::num(c, "weight", "prior component"),
                             detail::num(c, "lo", "prior component"),
                             detail::num(c, "hi", "prior component")});
        }
        Prior p = Prior::mixture_of_uniforms(comps);
        if (std::abs(p.lo() - lo) > stol || std::abs(p.hi() - hi) > stol)
            throw ConfigError("prior: declared support does not match the mixture components");
        return p;
    }
    if (kind == "piecewise-linear-cdf") {
        detail::reject_unknown_keys(params, {"knots"}, "prior.params");
        if (!params.contains("knots") || !params["knots"].is_array())
            throw ConfigError("prior.params: 'knots' array required");
        std::vector<std::pair<double, double>> knots;
        for (const auto& k : params["knots"]) {
            if (!k.is_array() || k.size() != 2)
                throw ConfigError("prior knots must be [z, F] pairs");
            knots.emplace_back(k[0].get<double>(), k[1].get<double>());
        }
        Prior p = Prior::piecewise_linear_cdf(knots);
        if (std::abs(p.lo() - lo) > stol || std::abs(p.hi() - hi) > stol)
            throw ConfigError("prior: declared support does not match the CDF knots");
        return p;
    }
    throw ConfigError("prior: unknown kind '" + kind + "'");
}

inline json prior_to_json(const Prior& p) {
    json j;
    j["kind"] = to_string(p.kind());
    j["support"] = {p.lo(), p.hi()};
    json params = json::object();
    switch (p.kind()) {
        case PriorKind::Uniform: break;
        case PriorKind::TruncatedGaussian:
            params["mu"] = p.param_mu();
            params["sigma"] = p.param_sigma();
            break;
        case PriorKind::MixtureOfUniforms: {
            json arr = json::array();
            for (const auto& c : p.components())
                arr.push_back({{"weight", c.weight}, {"lo", c.lo}, {"hi", c.hi}});
            params["components"] = arr;
            break;
        }
        case PriorKind::PiecewiseLinearCdf: {
            json arr = json::array();
            for (const auto& k : p.knots()) arr.push_back({k.first, k.second});
            params["knots"] = arr;
            break;
        }
    }
    j["params"] = params;
    return j;
}

struct ModelConfig {
    Network net;
    Prior prior;
};

inline ModelConfig parse_model_config(const json& j, bool allow_scenarios = false) {
    std::set<std::string> top{"nodes", "edges", "shock_node", "commission", "prior"};
    if (allow_scenarios) top.insert("scenarios");
    detail::reject_unknown_keys(j, top, "config");
    for (const char* key : {"nodes", "edges", "shock_node", "commission", "prior"})
        if (!j.contains(key)) throw ConfigError(std::string("config: missing key '") + key + "'");
    if (!j["shock_node"].is_number_integer() || j["shock_node"].get<int>() != 0)
        throw ConfigError("config: shock_node must be 0");

    const auto& nodes = j["nodes"];
    if (!nodes.is_array() || nodes.empty()) throw ConfigError("config: 'nodes' array required");
    int n = int(nodes.size());
    Network net;
    net.mass.assign(n, 0);
    net.beta.assign(n, 0);
    net.market_size.assign(n, 0);
    std::vector<char> seen(n, 0);
    for (const auto& nd : nodes) {
        detail::reject_unknown_keys(nd, {"id", "mass", "beta", "market_size"}, "node");
        if (!nd.contains("id") || !nd["id"].is_number_integer())
            throw ConfigError("node: integer 'id' required");
        int id = nd["id"].get<int>();
        if (id < 0 || id >= n || seen[id]) throw ConfigError("node ids must be 0..n-1, unique");
        seen[id] = 1;
        net.mass[id] = detail::num(nd, "mass", "node");
        net.beta[id] = detail::num(nd, "beta", "node");
        if (id == 0) {
            if (nd.contains("market_size"))
                throw ConfigError("node 0 is the shock node; its market_size is stochastic");
        } else {
            net.market_size[id] = detail::num(nd, "market_size", "node");
        }
    }
    for (const auto& e : j["edges"]) {
        detail::reject_unknown_keys(e, {"u", "v", "cost"}, "edge");
        Network::Edge edge;
        edge.u = int(detail::num(e, "u", "edge"));
        edge.v = int(detail::num(e, "v", "edge"));
        edge.cost = detail::num(e, "cost", "edge");
        net.edges.push_back(edge);
    }
    if (!j["commission"].is_number()) throw ConfigError("config: 'commission' must be a number");
    net.commission = j["commission"].get<double>();
    net.validate();

    ModelConfig cfg{std::move(net), parse_prior(j["prior"])};
    // connectivity check up front
    shortest_distances(cfg.net);
    return cfg;
}

struct ScenarioConfig {
    Network net;
    Prior prior;  // placeholder prior (first scenario's theta) for shared tooling
    std::vector<Scenario> scenarios;
};

inline ScenarioConfig parse_scenario_config(const json& j) {
    ModelConfig base = parse_model_config(j, /*allow_scenarios=*/true);
    if (!j.contains("scenarios") || !j["scenarios"].is_array() || j["scenarios"].empty())
        throw ConfigError("config: 'scenarios' array required");
    std::vector<Scenario> scenarios;
    for (const auto& s : j["scenarios"]) {
        detail::reject_unknown_keys(s, {"rho", "nu", "theta"}, "scenario");
        if (!s.contains("nu") || !s["nu"].is_array() ||
            int(s["nu"].size()) != base.net.size())
            throw ConfigError("scenario: 'nu' must list one entry per node");
        std::vector<double> nu;
        for (const auto& x : s["nu"]) nu.push_back(x.get<double>());
        if (!s.contains("theta")) throw ConfigError("scenario: 'theta' prior required");
        scenarios.emplace_back(detail::num(s, "rho", "scenario"), std::move(nu),
                               parse_prior(s["theta"]));
    }
    return ScenarioConfig{std::move(base.net), std::move(base.prior), std::move(scenarios)};
}

inline ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("JSON parse error in ") + path + ": " + e.what());
    }
    return parse_model_config(j);
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("JSON parse error in ") + path + ": " + e.what());
    }
    return parse_scenario_config(j);
}

// ---------------------------------------------------------------------------
// Mechanism serialization: {cutoffs, modes, atoms}, round-trip stable.
// ---------------------------------------------------------------------------

inline json mechanism_to_json(const MonotonePartitional& m) {
    json j;
    json cutoffs = json::array(), modes = json::array(), atoms = json::array();
    if (!m.cells.empty()) cutoffs.push_back(m.cells.front().lo);
    for (const auto& c : m.cells) {
        cutoffs.push_back(c.hi);
        modes.push_back(c.pool ? "pool" : "reveal");
        if (c.pool)
            atoms.push_back(c.atom);
        else
            atoms.push_back(nullptr);
    }
    j["cutoffs"] = cutoffs;
    j["modes"] = modes;
    j["atoms"] = atoms;
    return j;
}

inline MonotonePartitional mechanism_from_json(const json& j) {
    detail::reject_unknown_keys(j, {"cutoffs", "modes", "atoms"}, "mechanism");
    const auto& cutoffs = j.at("cutoffs");
    const auto& modes = j.at("modes");
    const auto& atoms = j.at("atoms");
    if (!cutoffs.is_array() || !modes.is_array() || !atoms.is_array() ||
        cutoffs.size() != modes.size() + 1 || modes.size() != atoms.size())
        throw ConfigError("mechanism: cutoffs/modes/atoms size mismatch");
    MonotonePartitional m;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        MonotonePartitional::Cell c;
        c.lo = cutoffs[i].get<double>();
        c.hi = cutoffs[i + 1].get<double>();
        std::string mode = modes[i].get<std::string>();
        if (mode != "pool" && mode != "reveal")
            throw ConfigError("mechanism: mode must be 'pool' or 'reveal'");
        c.pool = mode == "pool";
        if (c.pool) {
            if (atoms[i].is_null()) throw ConfigError("mechanism: pooled cell needs an atom");
            c.atom = atoms[i].get<double>();
        } else if (!atoms[i].is_null()) {
            throw ConfigError("mechanism: reveal cell must have a null atom");
        }
        m.cells.push_back(c);
    }
    return m;
}

inline json structure_to_json(const IntervalStructure& s) {
    json arr = json::array();
    for (const auto& iv : s.intervals) {
        json j;
        j["interval"] = {iv.a, iv.b};
        if (iv.double_interval) {
            j["type"] = "double";
            j["atoms"] = {{"x", iv.x}, {"p_x", iv.px}, {"y", iv.y}, {"p_y", iv.py}};
            j["inner_cuts"] = {iv.z_in, iv.z_out};
        } else {
            j["type"] = "single";
            j["atoms"] = {{"x", iv.x}, {"p_x", iv.px}};
        }
        arr.push_back(j);
    }
    return json{{"intervals", arr}};
}

inline json table_to_json(const RegimeTable& tab) {
    auto R = revenue_function(tab);
    json regimes = json::array();
    for (const auto& reg : tab.regimes) {
        json j{{"k", reg.k},
               {"lo", reg.lo},
               {"hi", reg.hi},
               {"slope", reg.slope},
               {"R_lo", R.eval(reg.lo)}};
        if (!reg.move_in.empty()) j["move_in"] = reg.move_in;
        if (!reg.depleted.empty()) j["depleted"] = reg.depleted;
        if (!reg.move_out.empty()) j["move_out"] = reg.move_out;
        if (reg.shock_depleted) j["shock_depleted"] = true;
        regimes.push_back(j);
    }
    return json{{"support", {tab.support_lo, tab.support_hi}},
                {"mean_state", tab.mean_state},
                {"anchor_revenue", tab.anchor_revenue},
                {"K", tab.K},
                {"K_tilde", tab.K_tilde},
                {"regimes", regimes}};
}

inline json pwl_to_json(const PiecewiseLinear& f) {
    return json{{"breakpoints", f.breakpoints()}, {"values", f.values()}};
}

inline json certificate_to_json(const Certificate& c) {
    return json{{"ok", c.ok},
                {"nu_convex", c.nu_convex},
                {"max_violation", c.max_violation},
                {"dominance_violation", c.dominance_violation},
                {"support_violation", c.support_violation},
                {"integral_gap", c.integral_gap},
                {"mpc_violation", c.mpc_violation}};
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

}  // namespace infodesign
