#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "infodesign/errors.hpp"
#include "infodesign/network.hpp"
#include "infodesign/prior.hpp"
#include "infodesign/pwl.hpp"

namespace infodesign {

// ---------------------------------------------------------------------------
// Potential maximization (Wardrop equilibrium for a given posterior mean
// vector of price intercepts).
// ---------------------------------------------------------------------------

struct StrategyProfile {
    std::vector<std::vector<double>> x;  // x[i][j]: mass moving i -> j
    std::vector<double> q;               // induced distribution
    double potential = 0;
    double wardrop_residual = 0;
    long sweeps = 0;
};

inline double revenue_at(const Network& net, const std::vector<double>& t,
                         const std::vector<double>& q) {
    double rev = 0;
    for (int i = 0; i < net.size(); ++i) rev += (t[i] - net.beta[i] * q[i]) * q[i];
    return net.commission * rev;
}

namespace detail {

inline double potential_value(const Network& net, const std::vector<double>& t,
                              const std::vector<std::vector<double>>& c,
                              const StrategyProfile& sp) {
    double phi = 0;
    for (int j = 0; j < net.size(); ++j)
        phi += t[j] * sp.q[j] - 0.5 * net.beta[j] * sp.q[j] * sp.q[j];
    phi *= (1 - net.commission);
    for (int i = 0; i < net.size(); ++i)
        for (int j = 0; j < net.size(); ++j)
            if (sp.x[i][j] > 0) phi -= c[i][j] * sp.x[i][j];
    return phi;
}

}  // namespace detail

// Frank-Wolfe with pairwise (away) steps over the product of per-origin
// scaled simplices.  The linear oracle on each simplex is a coordinate
// argmax, the objective is quadratic, so every step uses exact line search.
struct SolveOptions {
    double gap_tol = 1e-10;
    double residual_tol = 1e-9;
    long max_sweeps = 100000;
};

inline StrategyProfile solve_potential(const Network& net, const std::vector<double>& t,
                                       const SolveOptions& opt = {}) {
    net.validate();
    int n = net.size();
    if (int(t.size()) != n) throw DomainError("posterior mean vector size mismatch");
    auto c = net.cost_matrix();
    double r = net.commission;

    StrategyProfile sp;
    sp.x.assign(n, std::vector<double>(n, 0.0));
    sp.q.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        sp.x[i][i] = net.mass[i];
        sp.q[i] = net.mass[i];
    }

    std::vector<double> util(n);
    auto utilities = [&](int i) {
        for (int j = 0; j < n; ++j)
            util[j] = (1 - r) * (t[j] - net.beta[j] * sp.q[j]) - c[i][j];
    };

    double total_mass = std::accumulate(net.mass.begin(), net.mass.end(), 0.0);
    if (total_mass <= 0) return sp;

    for (long sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        for (int i = 0; i < n; ++i) {
            if (net.mass[i] <= 0) continue;
            for (int inner = 0; inner < 4 * n; ++inner) {
                utilities(i);
                int best = 0;
                for (int j = 1; j < n; ++j)
                    if (util[j] > util[best]) best = j;
                int worst = -1;
                for (int j = 0; j < n; ++j)
                    if (sp.x[i][j] > 0 && (worst < 0 || util[j] < util[worst])) worst = j;
                if (worst < 0 || best == worst) break;
                double improve = util[best] - util[worst];
                if (improve <= 1e-14 * (1 + std::abs(util[best]))) break;
                double curvature = (1 - r) * (net.beta[best] + net.beta[worst]);
                double step = curvature > 0 ? improve / curvature : sp.x[i][worst];
                step = std::min(step, sp.x[i][worst]);
                sp.x[i][worst] -= step;
                sp.x[i][best] += step;
                sp.q[worst] -= step;
                sp.q[best] += step;
            }
        }

        // Frank-Wolfe gap and Wardrop residual over occupied strategies
        double gap = 0, residual = 0;
        for (int i = 0; i < n; ++i) {
            if (net.mass[i] <= 0) continue;
            utilities(i);
            double umax = *std::max_element(util.begin(), util.end());
            for (int j = 0; j < n; ++j)
                if (sp.x[i][j] > 1e-12 * net.mass[i]) {
                    gap += sp.x[i][j] * (umax - util[j]);
                    residual = std::max(residual, umax - util[j]);
                }
        }
        sp.sweeps = sweep;
        sp.wardrop_residual = residual;
        sp.potential = detail::potential_value(net, t, c, sp);
        if (gap <= opt.gap_tol * (1 + std::abs(sp.potential)) && residual <= opt.residual_tol)
            return sp;
        if (sweep == opt.max_sweeps) {
            if (residual <= 1e-8) return sp;
            throw NonConvergence(sweep, gap);
        }
    }
    return sp;
}

// Convenience: single-shock evaluation at posterior mean s0 of the shock state.
inline std::vector<double> intercepts_single_shock(const Network& net, double s0) {
    std::vector<double> t(net.market_size.begin(), net.market_size.end());
    t[0] = s0;
    return t;
}

// ---------------------------------------------------------------------------
// Closed-form regime characterization.
// ---------------------------------------------------------------------------

struct Regime {
    int k = 0;          // regime index: negative / 0 / positive around the mean
    double lo = 0;      // state interval [lo, hi), clipped to the prior support
    double hi = 0;
    double slope = 0;   // dR/ds0 inside the regime
    std::vector<int> move_in;    // nodes sending agents to the shock node
    std::vector<int> depleted;   // emptied nodes (subset of move_in)
    std::vector<int> move_out;   // nodes receiving agents from the shock node
    bool shock_depleted = false; // q_0 = 0 throughout (final negative regime)
    std::vector<double> frozen_q;  // distribution when shock_depleted
};

struct RegimeTable {
    double support_lo = 0, support_hi = 0;
    double mean_state = 0;      // prior mean, the revenue anchor point
    double anchor_revenue = 0;  // no-information equilibrium revenue
    int K = 0, K_tilde = 0;
    std::vector<Regime> regimes;                    // ascending, positive width
    std::vector<std::pair<int, double>> thresholds; // (k, s0[k]) within the support

    const Regime& regime_at(double s0) const {
        for (std::size_t i = 0; i + 1 < regimes.size(); ++i)
            if (s0 < regimes[i].hi) return regimes[i];
        return regimes.back();
    }
};

namespace detail {

inline void require_positive_betas(const Network& net) {
    for (int i = 1; i < net.size(); ++i)
        if (!(net.beta[i] > 0))
            throw AssumptionViolated("closed-form regimes need positive elasticity at node " +
                                     std::to_string(i));
}

struct SideSums {
    double inv_beta = 0;   // sum over active movers of 1/beta_i
    double mass = 0;       // sum over movers of m_i
    double carry = 0;      // formula-specific per-side accumulator
};

inline double anchor_revenue(const Network& net, const Prior& prior) {
    auto t = intercepts_single_shock(net, prior.mean());
    return revenue_at(net, t, net.mass);
}

}  // namespace detail

// General regime computation under the initial-balance condition only:
// nodes join the affected sets one threshold at a time, depletion included
// on both sides.
inline RegimeTable regimes_general(const Network& net, const DistanceTable& dist,
                                   const Prior& prior) {
    detail::require_positive_betas(net);
    auto a3 = check_initial_balance(net, prior);
    if (!a3.ok)
        throw AssumptionViolated("initial market balance fails at pair (" +
                                 std::to_string(a3.violating.first) + "," +
                                 std::to_string(a3.violating.second) + ")");
    const int n = net.size();
    const double r = net.commission;
    const double E = prior.mean();
    const double lo = prior.lo(), hi = prior.hi();
    const double inf = std::numeric_limits<double>::infinity();

    RegimeTable tab;
    tab.support_lo = lo;
    tab.support_hi = hi;
    tab.mean_state = E;
    tab.anchor_revenue = detail::anchor_revenue(net, prior);

    auto tie_eq = [](double a, double b) {
        if (!std::isfinite(a) || !std::isfinite(b)) return false;
        return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };

    // ---- positive side ----
    std::vector<char> in_gamma(n, 0), in_dep(n, 0);
    std::vector<int> gamma, dep;
    std::vector<Regime> pos;
    double prev = E;
    int k = 0;
    auto pos_slope = [&]() {
        double num = net.mass[0], den_inv = 0;
        for (int i : gamma) num += net.mass[i];
        for (int i : gamma)
            if (!in_dep[i]) {
                num += dist.d[i] / (net.beta[i] * (1 - r));
                den_inv += 1.0 / net.beta[i];
            }
        if (k == 0) return r * net.mass[0];  // exact by construction
        return r * num / (net.beta[0] * (den_inv + 1.0 / net.beta[0]));
    };
    auto pos_threshold = [&](double tau) {
        double inv = 1.0 / net.beta[0], carry = 0, mass = net.mass[0];
        for (int i : gamma) mass += net.mass[i];
        for (int i : gamma)
            if (!in_dep[i]) {
                inv += 1.0 / net.beta[i];
                carry += (net.market_size[i] + dist.d[i] / (1 - r)) / net.beta[i];
            }
        return net.beta[0] * (tau / (1 - r) * inv - carry + mass);
    };
    while (prev < hi) {
        double tau1 = inf, tau2 = inf;
        for (int i = 1; i < n; ++i)
            if (!in_gamma[i])
                tau1 = std::min(tau1, (1 - r) * (net.market_size[i] - net.beta[i] * net.mass[i]) +
                                          dist.d[i]);
        for (int i : gamma)
            if (!in_dep[i]) tau2 = std::min(tau2, (1 - r) * net.market_size[i] + dist.d[i]);
        if (!std::isfinite(tau1) && !std::isfinite(tau2)) {
            pos.push_back({k, prev, hi, pos_slope(), gamma, dep, {}, false, {}});
            prev = hi;
            break;
        }
        double tau = std::min(tau1, tau2);
        double next = std::max(pos_threshold(tau), prev);
        if (next >= hi) {
            pos.push_back({k, prev, hi, pos_slope(), gamma, dep, {}, false, {}});
            if (next <= hi * (1 + 1e-12) + 1e-12) tab.thresholds.push_back({k + 1, next});
            prev = hi;
            break;
        }
        pos.push_back({k, prev, next, pos_slope(), gamma, dep, {}, false, {}});
        tab.thresholds.push_back({k + 1, next});
        if (tie_eq(tau1, tau2) || tau1 < tau2) {
            for (int i = 1; i < n; ++i)
                if (!in_gamma[i] &&
                    tie_eq((1 - r) * (net.market_size[i] - net.beta[i] * net.mass[i]) + dist.d[i],
                           tau1)) {
                    in_gamma[i] = 1;
                    gamma.push_back(i);
                }
        }
        if (tie_eq(tau1, tau2) || tau2 < tau1) {
            std::vector<int> adds;
            for (int i : gamma)
                if (!in_dep[i] && tie_eq((1 - r) * net.market_size[i] + dist.d[i], tau2))
                    adds.push_back(i);
            for (int i : adds) {
                in_dep[i] = 1;
                dep.push_back(i);
            }
        }
        std::sort(gamma.begin(), gamma.end());
        std::sort(dep.begin(), dep.end());
        prev = next;
        ++k;
    }

    // ---- negative side ----
    std::vector<char> in_gt(n, 0);
    std::vector<int> gt;
    std::vector<Regime> neg;  // generated downward; entry 0 is regime 0's left half
    double prev_dn = E;
    int kt = 0;
    auto neg_slope = [&]() {
        if (kt == 0) return r * net.mass[0];
        double num = net.mass[0], den_inv = 0;
        for (int i : gt) {
            num += net.mass[i] - dist.d[i] / (net.beta[i] * (1 - r));
            den_inv += 1.0 / net.beta[i];
        }
        return r * num / (net.beta[0] * (den_inv + 1.0 / net.beta[0]));
    };
    auto neg_threshold = [&](double tau) {
        double inv = 1.0 / net.beta[0], carry = 0, mass = net.mass[0];
        for (int i : gt) {
            mass += net.mass[i];
            inv += 1.0 / net.beta[i];
            carry += (net.market_size[i] - dist.d[i] / (1 - r)) / net.beta[i];
        }
        return net.beta[0] * (tau / (1 - r) * inv - carry + mass);
    };
    auto shock_depletion_point = [&]() {
        if (gt.empty()) return -inf;
        double num = -net.mass[0], den = 0;
        for (int i : gt) {
            num += (net.market_size[i] - dist.d[i] / (1 - r) - net.beta[i] * net.mass[i]) /
                   net.beta[i];
            den += 1.0 / net.beta[i];
        }
        return num / den;
    };
    auto frozen_distribution = [&](double s0_dep) {
        std::vector<double> q(net.mass.begin(), net.mass.end());
        q[0] = 0;
        for (int i : gt)
            q[i] = (net.market_size[i] - s0_dep - dist.d[i] / (1 - r)) / net.beta[i];
        return q;
    };
    while (prev_dn > lo) {
        double tau = -inf;
        for (int i = 1; i < n; ++i)
            if (!in_gt[i])
                tau = std::max(tau, (1 - r) * (net.market_size[i] - net.beta[i] * net.mass[i]) -
                                        dist.d[i]);
        double cand = std::isfinite(tau) ? std::min(neg_threshold(tau), prev_dn) : -inf;
        double cap = shock_depletion_point();
        if (cap >= cand) {
            // node 0 empties before the next node would join
            if (cap <= lo) {
                neg.push_back({-kt, lo, prev_dn, neg_slope(), {}, {}, gt, false, {}});
            } else {
                neg.push_back({-kt, cap, prev_dn, neg_slope(), {}, {}, gt, false, {}});
                tab.thresholds.push_back({-kt - 1, cap});
                neg.push_back({-kt - 1, lo, cap, 0.0, {}, {0}, gt, true, frozen_distribution(cap)});
            }
            prev_dn = lo;
            break;
        }
        if (cand <= lo) {
            neg.push_back({-kt, lo, prev_dn, neg_slope(), {}, {}, gt, false, {}});
            if (cand >= lo * (1 + 1e-12) - 1e-12 && std::isfinite(cand))
                tab.thresholds.push_back({-kt - 1, cand});
            prev_dn = lo;
            break;
        }
        neg.push_back({-kt, cand, prev_dn, neg_slope(), {}, {}, gt, false, {}});
        tab.thresholds.push_back({-kt - 1, cand});
        for (int i = 1; i < n; ++i)
            if (!in_gt[i] &&
                tie_eq((1 - r) * (net.market_size[i] - net.beta[i] * net.mass[i]) - dist.d[i],
                       tau)) {
                in_gt[i] = 1;
                gt.push_back(i);
            }
        std::sort(gt.begin(), gt.end());
        prev_dn = cand;
        ++kt;
    }
    // ---- assemble ----
    // neg[0] and pos[0] are both halves of regime 0; merge them.
    std::vector<Regime> all;
    for (auto it = neg.rbegin(); it != neg.rend(); ++it) all.push_back(*it);
    if (!all.empty() && !pos.empty()) {
        all.back().hi = pos.front().hi;  // regime 0 spans both halves
        for (std::size_t i = 1; i < pos.size(); ++i) all.push_back(pos[i]);
    } else if (all.empty()) {
        all = pos;
    }
    for (auto& reg : all) {
        reg.lo = std::max(reg.lo, lo);
        reg.hi = std::min(reg.hi, hi);
    }
    all.erase(std::remove_if(all.begin(), all.end(),
                             [&](const Regime& g) { return !(g.hi - g.lo > 0); }),
              all.end());
    if (all.empty())  // degenerate support
        all.push_back({0, lo, hi, r * net.mass[0], {}, {}, {}, false, {}});
    tab.regimes = std::move(all);
    std::sort(tab.thresholds.begin(), tab.thresholds.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& [kk, s] : tab.thresholds) {
        if (kk > 0) tab.K = std::max(tab.K, kk);
        if (kk < 0) tab.K_tilde = std::max(tab.K_tilde, -kk);
    }
    return tab;
}

// Closed-form regimes under homogeneous balance + no depletion: thresholds and
// slopes directly from the distance groups.
inline RegimeTable regimes_simple(const Network& net, const DistanceTable& dist,
                                  const Prior& prior) {
    detail::require_positive_betas(net);
    auto a1 = check_homogeneous_balance(net, prior);
    if (!a1.ok) throw AssumptionViolated("homogeneous market balance fails");
    auto a2 = check_no_depletion(net, prior, dist);
    if (!a2.ok) throw AssumptionViolated("no-depletion bound fails (" + a2.binding + ")");

    const double r = net.commission;
    const double E = prior.mean();
    const double lo = prior.lo(), hi = prior.hi();

    RegimeTable tab;
    tab.support_lo = lo;
    tab.support_hi = hi;
    tab.mean_state = E;
    tab.anchor_revenue = detail::anchor_revenue(net, prior);

    const std::size_t N = dist.groups.size();
    std::vector<Regime> pos, neg;

    // positive side: thresholds s0[k], slopes per affected prefix of groups
    double prev = E;
    std::vector<int> acc;
    for (std::size_t g = 0; g <= N && prev < hi; ++g) {
        double slope;
        {
            double num = net.mass[0], den_inv = 0;
            for (int i : acc) {
                num += net.mass[i] + dist.d[i] / (net.beta[i] * (1 - r));
                den_inv += 1.0 / net.beta[i];
            }
            slope = (g == 0) ? r * net.mass[0]
                             : r * num / (net.beta[0] * (den_inv + 1.0 / net.beta[0]));
        }
        double next;
        if (g == N) {
            next = hi;
        } else {
            double dk = dist.group_dist[g];
            double sum = 0;  // entering group's own terms vanish (d_k - d_i = 0)
            for (int i : acc) sum += net.beta[0] * (dk - dist.d[i]) / (net.beta[i] * (1 - r));
            next = E + dk / (1 - r) + sum;
        }
        pos.push_back({int(g), prev, std::min(next, hi), slope, acc, {}, {}, false, {}});
        if (g < N && next <= hi + 1e-12 * std::max(1.0, std::abs(hi)))
            tab.thresholds.push_back({int(g) + 1, next});
        if (g < N)
            for (int i : dist.groups[g]) acc.push_back(i);
        prev = next;
    }

    // negative side
    prev = E;
    acc.clear();
    for (std::size_t g = 0; g <= N && prev > lo; ++g) {
        double slope;
        {
            double num = net.mass[0], den_inv = 0;
            for (int i : acc) {
                num += net.mass[i] - dist.d[i] / (net.beta[i] * (1 - r));
                den_inv += 1.0 / net.beta[i];
            }
            slope = (g == 0) ? r * net.mass[0]
                             : r * num / (net.beta[0] * (den_inv + 1.0 / net.beta[0]));
        }
        double next;
        if (g == N) {
            next = lo;
        } else {
            double dk = dist.group_dist[g];
            double sum = 0;
            for (int i : acc) sum += net.beta[0] * (dk - dist.d[i]) / (net.beta[i] * (1 - r));
            next = E - dk / (1 - r) - sum;
        }
        neg.push_back({-int(g), std::max(next, lo), prev, slope, {}, {}, acc, false, {}});
        if (g < N && next >= lo - 1e-12 * std::max(1.0, std::abs(lo)))
            tab.thresholds.push_back({-int(g) - 1, next});
        if (g < N)
            for (int i : dist.groups[g]) acc.push_back(i);
        prev = next;
    }

    std::vector<Regime> all;
    for (auto it = neg.rbegin(); it != neg.rend(); ++it) all.push_back(*it);
    if (!all.empty() && !pos.empty()) {
        all.back().hi = pos.front().hi;
        all.back().move_in = pos.front().move_in;
        for (std::size_t i = 1; i < pos.size(); ++i) all.push_back(pos[i]);
    } else if (all.empty()) {
        all = pos;
    }
    all.erase(std::remove_if(all.begin(), all.end(),
                             [&](const Regime& g) { return !(g.hi - g.lo > 0); }),
              all.end());
    tab.regimes = std::move(all);
    std::sort(tab.thresholds.begin(), tab.thresholds.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& [kk, s] : tab.thresholds) {
        if (kk > 0) tab.K = std::max(tab.K, kk);
        if (kk < 0) tab.K_tilde = std::max(tab.K_tilde, -kk);
    }
    return tab;
}

// Closed-form equilibrium distribution implied by a regime table.
inline std::vector<double> closed_form_distribution(const Network& net, const DistanceTable& dist,
                                                    const RegimeTable& tab, double s0) {
    const double r = net.commission;
    const Regime& reg = tab.regime_at(s0);
    std::vector<double> q(net.mass.begin(), net.mass.end());
    if (reg.shock_depleted) return reg.frozen_q;
    if (reg.k > 0 || (!reg.move_in.empty() && reg.k == 0)) {
        double num = net.mass[0], den_inv = 1.0 / net.beta[0];
        for (int i : reg.move_in) num += net.mass[i];
        std::vector<char> dep(net.size(), 0);
        for (int i : reg.depleted) dep[i] = 1;
        for (int i : reg.move_in)
            if (!dep[i]) {
                num += (s0 - net.market_size[i] - dist.d[i] / (1 - r)) / net.beta[i];
                den_inv += 1.0 / net.beta[i];
            }
        double q0 = num / (net.beta[0] * den_inv);
        q[0] = q0;
        for (int i : reg.move_in) {
            q[i] = dep[i] ? 0.0
                          : (net.market_size[i] - s0 + dist.d[i] / (1 - r)) / net.beta[i] +
                                net.beta[0] / net.beta[i] * q0;
        }
        return q;
    }
    if (reg.k < 0 && !reg.move_out.empty()) {
        double num = net.mass[0], den_inv = 1.0 / net.beta[0];
        for (int i : reg.move_out) {
            num += net.mass[i] + (s0 - net.market_size[i] + dist.d[i] / (1 - r)) / net.beta[i];
            den_inv += 1.0 / net.beta[i];
        }
        double q0 = num / (net.beta[0] * den_inv);
        q[0] = q0;
        for (int i : reg.move_out)
            q[i] = (net.market_size[i] - s0 - dist.d[i] / (1 - r)) / net.beta[i] +
                   net.beta[0] / net.beta[i] * q0;
        return q;
    }
    // regime 0
    q[0] = net.mass[0];
    return q;
}

// The revenue function R(s0): slopes from the table, value anchored at the
// prior mean where the no-information equilibrium revenue is known.
inline PiecewiseLinear revenue_function(const RegimeTable& tab) {
    std::vector<double> z;
    z.push_back(tab.support_lo);
    for (const auto& reg : tab.regimes)
        if (reg.hi < tab.support_hi) z.push_back(reg.hi);
    z.push_back(tab.support_hi);

    std::vector<double> v(z.size(), 0.0);
    // locate anchor segment
    auto slope_at = [&](double a, double b) {
        double mid = 0.5 * (a + b);
        return tab.regime_at(mid).slope;
    };
    // find index such that z[idx] <= mean <= z[idx+1]
    std::size_t idx = 0;
    while (idx + 2 < z.size() && z[idx + 1] <= tab.mean_state) ++idx;
    // value at z[idx] from anchor
    double v_left = tab.anchor_revenue - slope_at(z[idx], z[idx + 1]) * (tab.mean_state - z[idx]);
    v[idx] = v_left;
    for (std::size_t i = idx; i + 1 < z.size(); ++i)
        v[i + 1] = v[i] + slope_at(z[i], z[i + 1]) * (z[i + 1] - z[i]);
    for (std::size_t i = idx; i > 0; --i)
        v[i - 1] = v[i] - slope_at(z[i - 1], z[i]) * (z[i] - z[i - 1]);
    return PiecewiseLinear(std::move(z), std::move(v));
}

// Synthetic regime table wrapping an arbitrary piecewise-linear revenue
// function: one regime per linear piece.  Used when the revenue function does
// not come from a network (tests, externally supplied curves).
inline RegimeTable table_from_pwl(const PiecewiseLinear& R, const Prior& prior) {
    RegimeTable tab;
    tab.support_lo = prior.lo();
    tab.support_hi = prior.hi();
    tab.mean_state = prior.mean();
    tab.anchor_revenue = R.eval(tab.mean_state);
    const auto& z = R.breakpoints();
    int mean_piece = 0;
    for (std::size_t p = 0; p + 1 < z.size(); ++p)
        if (tab.mean_state >= z[p]) mean_piece = int(p);
    for (std::size_t p = 0; p + 1 < z.size(); ++p) {
        Regime reg;
        reg.k = int(p) - mean_piece;
        reg.lo = z[p];
        reg.hi = z[p + 1];
        reg.slope = R.slope(p);
        tab.regimes.push_back(reg);
        if (p > 0) tab.thresholds.push_back({reg.k, z[p]});
    }
    for (const auto& [kk, s] : tab.thresholds) {
        if (kk > 0) tab.K = std::max(tab.K, kk);
        if (kk < 0) tab.K_tilde = std::max(tab.K_tilde, -kk);
    }
    return tab;
}

// Regularity (no three regime points on one line).
struct RegularityReport {
    bool ok = true;
    std::array<int, 3> triple{-1, -1, -1};  // offending threshold indices
};

inline RegularityReport check_regularity(const RegimeTable& tab, double tol = 1e-9) {
    RegularityReport rep;
    auto R = revenue_function(tab);
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(tab.support_lo, R.eval(tab.support_lo));
    for (const auto& [k, s] : tab.thresholds)
        if (s > tab.support_lo && s < tab.support_hi) pts.emplace_back(s, R.eval(s));
    pts.emplace_back(tab.support_hi, R.eval(tab.support_hi));
    double xs = std::max(1.0, tab.support_hi - tab.support_lo);
    double ys = 1.0;
    for (auto& p : pts) ys = std::max(ys, std::abs(p.second));
    for (std::size_t a = 0; a + 2 < pts.size() && rep.ok; ++a)
        for (std::size_t b = a + 1; b + 1 < pts.size() && rep.ok; ++b)
            for (std::size_t c = b + 1; c < pts.size() && rep.ok; ++c) {
                double cross = (pts[b].first - pts[a].first) * (pts[c].second - pts[a].second) -
                               (pts[c].first - pts[a].first) * (pts[b].second - pts[a].second);
                if (std::abs(cross) <= tol * xs * ys) {
                    rep.ok = false;
                    rep.triple = {int(a), int(b), int(c)};
                }
            }
    return rep;
}

// CSV export: one row per regime.
inline std::string regimes_to_csv(const RegimeTable& tab) {
    auto R = revenue_function(tab);
    std::ostringstream os;
    os.precision(12);
    os << "k,s0_k,slope_k,R_k,affected_set\n";
    for (const auto& reg : tab.regimes) {
        os << reg.k << "," << reg.lo << "," << reg.slope << "," << R.eval(reg.lo) << ",";
        const auto& set = reg.k >= 0 ? reg.move_in : reg.move_out;
        for (std::size_t i = 0; i < set.size(); ++i) os << (i ? " " : "") << set[i];
        if (!reg.depleted.empty()) {
            os << "|dep:";
            for (std::size_t i = 0; i < reg.depleted.size(); ++i)
                os << (i ? " " : "") << reg.depleted[i];
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace infodesign
