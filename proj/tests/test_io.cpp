#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "infodesign/io.hpp"

using namespace infodesign;

namespace {

json line3_json() {
    return json::parse(R"({
      "nodes": [
        {"id": 0, "mass": 2.0, "beta": 1.0},
        {"id": 1, "mass": 2.0, "beta": 1.0, "market_size": 2.0},
        {"id": 2, "mass": 2.0, "beta": 1.0, "market_size": 2.0}
      ],
      "edges": [
        {"u": 0, "v": 1, "cost": 1.0},
        {"u": 1, "v": 2, "cost": 1.0}
      ],
      "shock_node": 0,
      "commission": 0.5,
      "prior": {"kind": "uniform", "support": [-2.0, 6.0], "params": {}}
    })");
}

}  // namespace

TEST_CASE("model config parsing") {
    SECTION("valid config round-trips into the expected network") {
        auto cfg = parse_model_config(line3_json());
        REQUIRE(cfg.net.size() == 3);
        REQUIRE(cfg.net.mass == std::vector<double>{2, 2, 2});
        REQUIRE(cfg.net.commission == 0.5);
        REQUIRE(cfg.prior.kind() == PriorKind::Uniform);
        REQUIRE(cfg.prior.mean() == Catch::Approx(2.0));
    }
    SECTION("unknown keys are rejected at every level") {
        auto j = line3_json();
        j["extra"] = 1;
        REQUIRE_THROWS_AS(parse_model_config(j), ConfigError);
        j = line3_json();
        j["nodes"][0]["typo"] = 1;
        REQUIRE_THROWS_AS(parse_model_config(j), ConfigError);
        j = line3_json();
        j["prior"]["params"]["mu"] = 0.0;
        REQUIRE_THROWS_AS(parse_model_config(j), ConfigError);
    }
    SECTION("the shock node must not carry a market size") {
        auto j = line3_json();
        j["nodes"][0]["market_size"] = 3.0;
        REQUIRE_THROWS_AS(parse_model_config(j), ConfigError);
    }
    SECTION("shock node other than 0 is rejected") {
        auto j = line3_json();
        j["shock_node"] = 1;
        REQUIRE_THROWS_AS(parse_model_config(j), ConfigError);
    }
    SECTION("commission of 1 is rejected") {
        auto j = line3_json();
        j["commission"] = 1.0;
        REQUIRE_THROWS_AS(parse_model_config(j), ConfigError);
    }
    SECTION("all prior kinds parse and serialize back") {
        for (auto pj : {
                 json{{"kind", "uniform"}, {"support", {0.0, 1.0}}, {"params", json::object()}},
                 json{{"kind", "truncated-gaussian"},
                      {"support", {-1.0, 3.0}},
                      {"params", {{"mu", 1.0}, {"sigma", 0.7}}}},
                 json{{"kind", "finite-mixture-of-uniforms"},
                      {"support", {0.0, 3.0}},
                      {"params",
                       {{"components", json::array({{{"weight", 0.4}, {"lo", 0.0}, {"hi", 1.0}},
                                                    {{"weight", 0.6}, {"lo", 0.5}, {"hi", 3.0}}})}}}},
                 json{{"kind", "piecewise-linear-cdf"},
                      {"support", {0.0, 2.0}},
                      {"params", {{"knots", json::array({{0.0, 0.0}, {1.0, 0.7}, {2.0, 1.0}})}}}},
             }) {
            auto p = parse_prior(pj);
            auto back = prior_to_json(p);
            auto p2 = parse_prior(back);
            REQUIRE(p2.kind() == p.kind());
            REQUIRE(p2.mean() == Catch::Approx(p.mean()).margin(1e-12));
        }
    }
}

TEST_CASE("mechanism serialization round trip") {
    auto F = fixtures::line3_prior();
    auto mech = MonotonePartitional::reveal_pool_reveal(F, -1.0, 3.0);
    auto j = mechanism_to_json(mech);
    auto back = mechanism_from_json(j);
    REQUIRE(back.cells.size() == mech.cells.size());
    for (std::size_t i = 0; i < mech.cells.size(); ++i) {
        REQUIRE(back.cells[i].lo == mech.cells[i].lo);
        REQUIRE(back.cells[i].hi == mech.cells[i].hi);
        REQUIRE(back.cells[i].pool == mech.cells[i].pool);
        if (mech.cells[i].pool) REQUIRE(back.cells[i].atom == mech.cells[i].atom);
    }
    REQUIRE(mechanism_to_json(back) == j);  // byte-stable second pass

    SECTION("invalid payloads are rejected") {
        auto bad = j;
        bad["modes"][0] = "maybe";
        REQUIRE_THROWS_AS(mechanism_from_json(bad), ConfigError);
        bad = j;
        bad["atoms"] = json::array();
        REQUIRE_THROWS_AS(mechanism_from_json(bad), ConfigError);
    }
}

TEST_CASE("scenario config parsing") {
    auto j = line3_json();
    j["scenarios"] = json::array();
    j["scenarios"].push_back(
        json{{"rho", 1.0},
             {"nu", {1.0, 0.0, 0.0}},
             {"theta", {{"kind", "uniform"}, {"support", {-2.0, 6.0}}, {"params", json::object()}}}});
    auto cfg = parse_scenario_config(j);
    REQUIRE(cfg.scenarios.size() == 1);
    REQUIRE(cfg.scenarios[0].nu == std::vector<double>{1, 0, 0});

    SECTION("nu must cover every node") {
        j["scenarios"][0]["nu"] = {1.0, 0.0};
        REQUIRE_THROWS_AS(parse_scenario_config(j), ConfigError);
    }
}
