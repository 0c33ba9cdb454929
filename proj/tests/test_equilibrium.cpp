#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "infodesign/equilibrium.hpp"

using namespace infodesign;

namespace {

// Independent potential evaluation for dominance checks.
double potential_of(const Network& net, const std::vector<double>& t,
                    const std::vector<std::vector<double>>& x) {
    auto c = net.cost_matrix();
    int n = net.size();
    std::vector<double> q(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q[j] += x[i][j];
    double phi = 0;
    for (int j = 0; j < n; ++j) phi += t[j] * q[j] - 0.5 * net.beta[j] * q[j] * q[j];
    phi *= (1 - net.commission);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) phi -= c[i][j] * x[i][j];
    return phi;
}

std::vector<std::vector<double>> random_feasible(const Network& net, std::mt19937_64& rng) {
    int n = net.size();
    std::vector<std::vector<double>> x(n, std::vector<double>(n, 0.0));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        double total = 0;
        std::vector<double> raw(n);
        for (int j = 0; j < n; ++j) total += raw[j] = U(rng);
        for (int j = 0; j < n; ++j) x[i][j] = net.mass[i] * raw[j] / total;
    }
    return x;
}

double solver_revenue(const Network& net, double s0) {
    auto t = intercepts_single_shock(net, s0);
    auto sp = solve_potential(net, t);
    return revenue_at(net, t, sp.q);
}

}  // namespace

TEST_CASE("potential solver reproduces the hand-solved line equilibria") {
    auto net = fixtures::line3();
    SECTION("at the prior mean nobody moves") {
        auto sp = solve_potential(net, intercepts_single_shock(net, 2.0));
        REQUIRE(sp.q[0] == Catch::Approx(2.0).margin(1e-7));
        REQUIRE(sp.q[1] == Catch::Approx(2.0).margin(1e-7));
        REQUIRE(sp.q[2] == Catch::Approx(2.0).margin(1e-7));
        REQUIRE(sp.wardrop_residual <= 1e-8);
    }
    SECTION("positive shock draws the near market in") {
        auto sp = solve_potential(net, intercepts_single_shock(net, 5.0));
        REQUIRE(sp.q[0] == Catch::Approx(2.5).margin(1e-7));
        REQUIRE(sp.q[1] == Catch::Approx(1.5).margin(1e-7));
        REQUIRE(sp.q[2] == Catch::Approx(2.0).margin(1e-7));
    }
    SECTION("negative shock pushes agents out") {
        auto sp = solve_potential(net, intercepts_single_shock(net, -1.0));
        REQUIRE(sp.q[0] == Catch::Approx(1.5).margin(1e-7));
        REQUIRE(sp.q[1] == Catch::Approx(2.5).margin(1e-7));
        REQUIRE(sp.q[2] == Catch::Approx(2.0).margin(1e-7));
    }
}

TEST_CASE("solver output dominates random feasible profiles") {
    std::mt19937_64 rng(5);
    auto net = fixtures::line3_dec();
    auto t = intercepts_single_shock(net, 7.0);
    auto sp = solve_potential(net, t);
    double phi_star = potential_of(net, t, sp.x);
    for (int k = 0; k < 1000; ++k) {
        auto x = random_feasible(net, rng);
        REQUIRE(phi_star >= potential_of(net, t, x) - 1e-9);
    }
}

TEST_CASE("regimes_simple on LINE3") {
    auto net = fixtures::line3();
    auto F = fixtures::line3_prior();
    auto dist = shortest_distances(net);
    auto tab = regimes_simple(net, dist, F);

    REQUIRE(tab.K == 1);
    REQUIRE(tab.K_tilde == 1);
    REQUIRE(tab.regimes.size() == 3);
    CHECK(tab.regimes[0].lo == Catch::Approx(-2.0));
    CHECK(tab.regimes[0].hi == Catch::Approx(0.0));
    CHECK(tab.regimes[0].slope == Catch::Approx(0.5));
    CHECK(tab.regimes[1].slope == 1.0);  // r m_0 exactly
    CHECK(tab.regimes[2].lo == Catch::Approx(4.0));
    CHECK(tab.regimes[2].slope == Catch::Approx(1.5));

    auto R = revenue_function(tab);
    REQUIRE(is_convex(R));
    CHECK(R.eval(2.0) == Catch::Approx(0.0).margin(1e-9));
    CHECK(R.eval(-2.0) == Catch::Approx(-3.0));
    CHECK(R.eval(0.0) == Catch::Approx(-2.0));
    CHECK(R.eval(4.0) == Catch::Approx(2.0));
    CHECK(R.eval(6.0) == Catch::Approx(5.0));
}

TEST_CASE("regimes_simple on the decreasing line") {
    auto net = fixtures::line3_dec();
    auto F = fixtures::line3_dec_prior();
    auto tab = regimes_simple(net, shortest_distances(net), F);

    // thresholds 2, 6, 10 (the last sits exactly on the support cap)
    REQUIRE(tab.K == 2);
    std::vector<double> ths;
    for (auto& [k, s] : tab.thresholds) ths.push_back(s);
    REQUIRE(ths.size() >= 3);
    CHECK(ths[ths.size() - 3] == Catch::Approx(2.0));
    CHECK(ths[ths.size() - 2] == Catch::Approx(6.0));
    CHECK(ths[ths.size() - 1] == Catch::Approx(10.0));

    // slope of regime -1 is 2.5: pinned by central differences of the solver
    // revenue below
    REQUIRE(tab.regimes.size() == 3);
    CHECK(tab.regimes[0].slope == Catch::Approx(2.5));
    CHECK(tab.regimes[1].slope == 2.0);  // r m_0
    CHECK(tab.regimes[2].slope == Catch::Approx(3.5));

    auto R = revenue_function(tab);
    for (double s0 : {-1.0, 0.5, 3.0, 5.0, 7.0, 9.0}) {
        double h = 0.25;
        double fd = (solver_revenue(net, s0 + h) - solver_revenue(net, s0 - h)) / (2 * h);
        double slope = (R.eval(s0 + h) - R.eval(s0 - h)) / (2 * h);
        REQUIRE(slope == Catch::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("revenue function matches the solver pointwise") {
    std::mt19937_64 rng(17);
    for (const auto& [net, F] :
         {std::pair{fixtures::line3(), fixtures::line3_prior()},
          std::pair{fixtures::line3_dec(), fixtures::line3_dec_prior()},
          std::pair{fixtures::star_dec(), fixtures::star_dec_prior()}}) {
        auto tab = regimes_simple(net, shortest_distances(net), F);
        auto R = revenue_function(tab);
        std::uniform_real_distribution<double> U(F.lo(), F.hi());
        for (int k = 0; k < 40; ++k) {
            double s0 = U(rng);
            double ref = solver_revenue(net, s0);
            REQUIRE(R.eval(s0) == Catch::Approx(ref).margin(1e-6 * std::max(1.0, std::abs(ref))));
        }
    }
}

TEST_CASE("general regimes specialize to the simple ones under A1+A2") {
    for (const auto& [net, F] :
         {std::pair{fixtures::line3(), fixtures::line3_prior()},
          std::pair{fixtures::line3_dec(), fixtures::line3_dec_prior()},
          std::pair{fixtures::line3_inc(), fixtures::line3_inc_prior()},
          std::pair{fixtures::star_dec(), fixtures::star_dec_prior()},
          std::pair{fixtures::star_inc(), fixtures::star_inc_prior()}}) {
        auto dist = shortest_distances(net);
        auto simple = regimes_simple(net, dist, F);
        auto general = regimes_general(net, dist, F);
        auto Rs = revenue_function(simple);
        auto Rg = revenue_function(general);
        for (int i = 0; i <= 64; ++i) {
            double z = F.lo() + F.width() * i / 64;
            REQUIRE(Rs.eval(z) == Catch::Approx(Rg.eval(z)).margin(1e-9));
        }
        for (const auto& reg : general.regimes) REQUIRE(reg.depleted.empty());
    }
}

TEST_CASE("two-node depletion regimes") {
    auto net = fixtures::two_node();
    auto F = Prior::uniform(-4, 6);  // mean 1 balances beta_0 m_0 = 1
    auto dist = shortest_distances(net);
    auto tab = regimes_general(net, dist, F);

    SECTION("negative side: the shock node empties below -3") {
        const auto& reg = tab.regime_at(-3.5);
        REQUIRE(reg.shock_depleted);
        REQUIRE(reg.slope == 0.0);
        auto q = closed_form_distribution(net, dist, tab, -3.5);
        REQUIRE(q[0] == Catch::Approx(0.0));
        REQUIRE(q[1] == Catch::Approx(2.0));
        auto sp = solve_potential(net, intercepts_single_shock(net, -3.5));
        REQUIRE(sp.q[0] == Catch::Approx(0.0).margin(1e-7));
    }
    SECTION("positive side: the non-shock market empties above 5") {
        const auto& reg = tab.regime_at(5.5);
        REQUIRE(reg.depleted == std::vector<int>{1});
        REQUIRE(reg.slope == Catch::Approx(1.0));
        auto q = closed_form_distribution(net, dist, tab, 5.5);
        REQUIRE(q[1] == Catch::Approx(0.0));
        REQUIRE(q[0] == Catch::Approx(2.0));
        auto sp = solve_potential(net, intercepts_single_shock(net, 5.5));
        REQUIRE(sp.q[1] == Catch::Approx(0.0).margin(1e-7));
    }
    SECTION("revenue function tracks the solver across all regimes") {
        auto R = revenue_function(tab);
        for (int i = 0; i <= 50; ++i) {
            double s0 = F.lo() + F.width() * i / 50;
            REQUIRE(R.eval(s0) == Catch::Approx(solver_revenue(net, s0)).margin(2e-7));
        }
    }
}

TEST_CASE("closed form matches the solver on random balanced networks") {
    std::mt19937_64 rng(23);
    int tested = 0;
    for (int t = 0; t < 40; ++t) {
        auto rn = fixtures::random_network(rng, 6);
        double W = 0.8 * (rn.mean_state + 1.0);
        auto F = Prior::uniform(rn.mean_state - W, rn.mean_state + W);
        if (!check_initial_balance(rn.net, F).ok) continue;
        auto dist = shortest_distances(rn.net);
        auto tab = regimes_general(rn.net, dist, F);
        std::uniform_real_distribution<double> U(F.lo(), F.hi());
        for (int k = 0; k < 8; ++k) {
            double s0 = U(rng);
            auto q_cf = closed_form_distribution(rn.net, dist, tab, s0);
            auto sp = solve_potential(rn.net, intercepts_single_shock(rn.net, s0));
            for (int i = 0; i < rn.net.size(); ++i)
                REQUIRE(sp.q[i] == Catch::Approx(q_cf[i]).margin(1e-6));
        }
        ++tested;
    }
    REQUIRE(tested >= 25);
}

TEST_CASE("q0 is nondecreasing in the posterior mean") {
    for (const auto& [net, F] : {std::pair{fixtures::line3_dec(), fixtures::line3_dec_prior()},
                                 std::pair{fixtures::two_node(), Prior::uniform(-4, 6)}}) {
        auto dist = shortest_distances(net);
        auto tab = regimes_general(net, dist, F);
        double prev = -1e100;
        for (int i = 0; i <= 100; ++i) {
            double s0 = F.lo() + F.width() * i / 100;
            double q0 = closed_form_distribution(net, dist, tab, s0)[0];
            REQUIRE(q0 >= prev - 1e-10);
            prev = q0;
        }
    }
}

TEST_CASE("regularity check") {
    SECTION("LINE3 has no colinear regime triple") {
        auto net = fixtures::line3();
        auto tab = regimes_simple(net, shortest_distances(net), fixtures::line3_prior());
        REQUIRE(check_regularity(tab).ok);
    }
    SECTION("duplicated slope across a kink is flagged") {
        auto F = Prior::uniform(0, 3);
        PiecewiseLinear R({0, 1, 2, 3}, {0, 1, 2, 4});  // slopes 1,1,2: colinear triple
        auto tab = table_from_pwl(R, F);
        auto rep = check_regularity(tab);
        REQUIRE_FALSE(rep.ok);
        REQUIRE(rep.triple[0] >= 0);
    }
    SECTION("single-regime table is vacuously regular") {
        auto F = Prior::uniform(0, 1);
        PiecewiseLinear R({0.0, 1.0}, {0.0, 2.0});
        REQUIRE(check_regularity(table_from_pwl(R, F)).ok);
    }
}

TEST_CASE("assumption gates") {
    auto net = fixtures::line3();
    net.mass[0] = 3;  // breaks homogeneous balance
    auto dist = shortest_distances(net);
    REQUIRE_THROWS_AS(regimes_simple(net, dist, fixtures::line3_prior()), AssumptionViolated);

    Network imbalanced;
    imbalanced.mass = {1, 1};
    imbalanced.beta = {1, 1};
    imbalanced.market_size = {0, 30.0};
    imbalanced.edges = {{0, 1, 1.0}};
    imbalanced.commission = 0.5;
    REQUIRE_THROWS_AS(
        regimes_general(imbalanced, shortest_distances(imbalanced), Prior::uniform(0.5, 1.5)),
        AssumptionViolated);
}
