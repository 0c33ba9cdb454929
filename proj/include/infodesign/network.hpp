#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "infodesign/errors.hpp"
#include "infodesign/prior.hpp"

namespace infodesign {

// Undirected spatial market.  Node 0 is the shock node; its market size is
// stochastic and therefore not stored.
struct Network {
    struct Edge {
        int u, v;
        double cost;
    };

    std::vector<double> mass;         // m_i >= 0
    std::vector<double> beta;         // beta_i >= 0, beta_0 > 0
    std::vector<double> market_size;  // s_i for i >= 1; entry 0 ignored
    std::vector<Edge> edges;
    double commission = 0.0;  // r in [0, 1)

    int size() const { return int(mass.size()); }

    void validate() const {
        int n = size();
        if (n < 1) throw ConfigError("network needs at least the shock node");
        if (int(beta.size()) != n || int(market_size.size()) != n)
            throw ConfigError("mass/beta/market_size length mismatch");
        if (!(beta[0] > 0)) throw ConfigError("shock node elasticity beta_0 must be positive");
        for (int i = 0; i < n; ++i) {
            if (mass[i] < 0) throw ConfigError("agent mass must be nonnegative");
            if (beta[i] < 0) throw ConfigError("elasticity must be nonnegative");
            if (i > 0 && market_size[i] < 0) throw ConfigError("market size must be nonnegative");
        }
        if (!(commission >= 0 && commission < 1))
            throw ConfigError("commission must lie in [0,1)");
        for (const auto& e : edges) {
            if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v)
                throw ConfigError("edge endpoints out of range");
            if (e.cost < 0) throw ConfigError("edge cost must be nonnegative");
        }
    }

    // All-pairs shortest-path costs (metric closure of the edge set).
    std::vector<std::vector<double>> cost_matrix() const {
        int n = size();
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<std::vector<double>> c(n, std::vector<double>(n, inf));
        for (int i = 0; i < n; ++i) c[i][i] = 0.0;
        for (const auto& e : edges) {
            c[e.u][e.v] = std::min(c[e.u][e.v], e.cost);
            c[e.v][e.u] = std::min(c[e.v][e.u], e.cost);
        }
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (c[i][k] + c[k][j] < c[i][j]) c[i][j] = c[i][k] + c[k][j];
        return c;
    }
};

// Shortest distances from the shock node plus the grouping of the remaining
// nodes by common distance.
struct DistanceTable {
    std::vector<double> d;                 // d_i = shortest-path cost 0 -> i
    std::vector<std::vector<int>> groups;  // V_n, sorted by distance
    std::vector<double> group_dist;        // d_n, strictly increasing
};

inline DistanceTable shortest_distances(const Network& net, double rel_tol = 1e-9) {
    net.validate();
    auto c = net.cost_matrix();
    int n = net.size();
    DistanceTable t;
    t.d.resize(n);
    for (int i = 0; i < n; ++i) {
        t.d[i] = c[0][i];
        if (!std::isfinite(t.d[i]))
            throw DisconnectedGraph("node " + std::to_string(i) + " unreachable from shock node");
    }
    std::vector<int> order(n - 1);
    std::iota(order.begin(), order.end(), 1);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (t.d[a] != t.d[b]) return t.d[a] < t.d[b];
        return a < b;
    });
    double scale = 1.0;
    for (int i = 1; i < n; ++i) scale = std::max(scale, t.d[i]);
    for (int i : order) {
        if (!t.groups.empty() && std::abs(t.d[i] - t.group_dist.back()) <= rel_tol * scale) {
            t.groups.back().push_back(i);
        } else {
            t.groups.push_back({i});
            t.group_dist.push_back(t.d[i]);
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Assumption checkers.  Diagnostic: they report rather than throw.
// ---------------------------------------------------------------------------

constexpr double kBalanceTol = 1e-7;

struct BalanceReport {
    bool ok = false;
    std::vector<double> residuals;  // per node: price under the initial allocation
};

// Homogeneously balanced markets: E_F[s_0] = beta_0 m_0 and s_i = beta_i m_i,
// i.e. every initial price is zero under the normalization.
inline BalanceReport check_homogeneous_balance(const Network& net, const Prior& prior,
                                               double tol = kBalanceTol) {
    BalanceReport r;
    int n = net.size();
    r.residuals.resize(n);
    r.residuals[0] = prior.mean() - net.beta[0] * net.mass[0];
    for (int i = 1; i < n; ++i) r.residuals[i] = net.market_size[i] - net.beta[i] * net.mass[i];
    r.ok = true;
    for (double x : r.residuals)
        if (std::abs(x) > tol) r.ok = false;
    return r;
}

struct DepletionReport {
    bool ok = false;
    double upper_bound = 0;  // sup S_0 must not exceed this
    double lower_bound = 0;  // inf S_0 must not fall below this
    int k_hat = 0;           // prefix of distance-sorted nodes used in the lower bound
    std::string binding;     // "upper" or "lower": the tighter (or violated) side
};

// No market depletion: the shock stays small enough that no node empties out.
inline DepletionReport check_no_depletion(const Network& net, const Prior& prior,
                                          const DistanceTable& dist) {
    DepletionReport rep;
    int n = net.size();
    double r = net.commission;

    double ub = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < n; ++i)
        ub = std::max(ub, net.market_size[i] + dist.d[i] / (1 - r));
    rep.upper_bound = ub;

    // nodes sorted by (d_i, id); the bound uses the prefix 1..k_hat that is
    // consistent with the order in which nodes receive outflowing agents
    std::vector<int> order(n - 1);
    std::iota(order.begin(), order.end(), 1);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (dist.d[a] != dist.d[b]) return dist.d[a] < dist.d[b];
        return a < b;
    });
    auto bound_for = [&](int khat) {
        double num = net.mass[0], den = 0;
        for (int j = 0; j < khat; ++j) {
            int i = order[j];
            if (net.beta[i] <= 0) continue;
            num += dist.d[i] / ((1 - r) * net.beta[i]);
            den += 1.0 / net.beta[i];
        }
        if (den <= 0) return -std::numeric_limits<double>::infinity();
        return -num / den;
    };
    int best_k = int(order.size());
    double best_violation = std::numeric_limits<double>::infinity();
    for (int khat = 1; khat <= int(order.size()); ++khat) {
        double B = bound_for(khat);
        double scaled = (1 - r) * B;  // price scale at the depletion point
        double d_k = dist.d[order[khat - 1]];
        double d_next = (khat < int(order.size())) ? dist.d[order[khat]]
                                                   : std::numeric_limits<double>::infinity();
        double viol = std::max(0.0, scaled - (-d_k)) + std::max(0.0, (-d_next) - scaled);
        if (viol < best_violation) {
            best_violation = viol;
            best_k = khat;
        }
        if (viol == 0) break;
    }
    rep.k_hat = best_k;
    rep.lower_bound = bound_for(best_k);

    double slack_hi = rep.upper_bound - prior.hi();
    double slack_lo = prior.lo() - rep.lower_bound;
    rep.ok = slack_hi >= -kBalanceTol && slack_lo >= -kBalanceTol;
    rep.binding = (slack_hi <= slack_lo) ? "upper" : "lower";
    return rep;
}

struct InitialBalanceReport {
    bool ok = false;
    std::pair<int, int> violating{-1, -1};
    double worst_slack = 0;  // most negative slack found
};

// Initial market balance: no agent wants to move before any signal, within
// the shortest-path metric closure.
inline InitialBalanceReport check_initial_balance(const Network& net, const Prior& prior,
                                                  double tol = kBalanceTol) {
    InitialBalanceReport rep;
    int n = net.size();
    auto c = net.cost_matrix();
    double r = net.commission;
    std::vector<double> price(n);
    price[0] = prior.mean() - net.beta[0] * net.mass[0];
    for (int i = 1; i < n; ++i) price[i] = net.market_size[i] - net.beta[i] * net.mass[i];
    rep.ok = true;
    rep.worst_slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double slack = c[i][j] - (1 - r) * (price[j] - price[i]);
            if (slack < rep.worst_slack) {
                rep.worst_slack = slack;
                if (slack < -tol && rep.ok) {
                    rep.violating = {i, j};
                }
            }
            if (slack < -tol) rep.ok = false;
        }
    }
    if (rep.ok) rep.violating = {-1, -1};
    return rep;
}

// ---------------------------------------------------------------------------
// Market-size classification relative to distances (the rate thresholds
// +-1/(1-r)) and the similar / monotone / similar pattern detection.
// ---------------------------------------------------------------------------

enum class SizePattern { Similar, Increasing, Decreasing, Mixed };

inline std::string to_string(SizePattern p) {
    switch (p) {
        case SizePattern::Similar: return "similar";
        case SizePattern::Increasing: return "increasing";
        case SizePattern::Decreasing: return "decreasing";
        case SizePattern::Mixed: return "mixed";
    }
    return "?";
}

struct MarketClass {
    struct PairLabel {
        int group_left, group_right;  // adjacent group indices
        SizePattern label;            // never Mixed for a single pair unless nodes disagree
        double ratio_min, ratio_max;
    };
    SizePattern pattern = SizePattern::Similar;
    double d_lo = 0, d_hi = 0;  // transition region [d_lo, d_hi]; equal when empty
    std::vector<PairLabel> pairs;
};

inline MarketClass classify_market_sizes(const Network& net, const DistanceTable& dist) {
    MarketClass mc;
    double thr = 1.0 / (1.0 - net.commission);
    for (std::size_t g = 1; g < dist.groups.size(); ++g) {
        MarketClass::PairLabel pl;
        pl.group_left = int(g) - 1;
        pl.group_right = int(g);
        pl.ratio_min = std::numeric_limits<double>::infinity();
        pl.ratio_max = -std::numeric_limits<double>::infinity();
        for (int i : dist.groups[g])
            for (int j : dist.groups[g - 1]) {
                double ratio = (net.market_size[i] - net.market_size[j]) /
                               (dist.d[i] - dist.d[j]);
                pl.ratio_min = std::min(pl.ratio_min, ratio);
                pl.ratio_max = std::max(pl.ratio_max, ratio);
            }
        // ties at +-1/(1-r) classify as similar (weak inequality)
        if (pl.ratio_max <= thr && pl.ratio_min >= -thr)
            pl.label = SizePattern::Similar;
        else if (pl.ratio_min > thr)
            pl.label = SizePattern::Increasing;
        else if (pl.ratio_max < -thr)
            pl.label = SizePattern::Decreasing;
        else
            pl.label = SizePattern::Mixed;
        mc.pairs.push_back(pl);
    }

    // pattern: leading similars, one monotone run, trailing similars
    SizePattern dir = SizePattern::Similar;
    int state = 0;  // 0: leading similar, 1: monotone run, 2: trailing similar
    bool ok = true;
    for (const auto& pl : mc.pairs) {
        if (pl.label == SizePattern::Mixed) {
            ok = false;
            break;
        }
        if (pl.label == SizePattern::Similar) {
            if (state == 1) state = 2;
        } else {
            if (state == 2 || (state == 1 && pl.label != dir)) {
                ok = false;
                break;
            }
            if (state == 0) {
                dir = pl.label;
                state = 1;
                mc.d_lo = dist.group_dist[pl.group_left];
            }
            mc.d_hi = dist.group_dist[pl.group_right];
        }
    }
    if (!ok) {
        mc.pattern = SizePattern::Mixed;
        mc.d_lo = mc.d_hi = 0;
    } else if (state == 0) {
        mc.pattern = SizePattern::Similar;
        mc.d_lo = mc.d_hi = 0;
    } else {
        mc.pattern = dir;
    }
    return mc;
}

// Commission threshold above which every pair classifies as similar.
// Pairs with equal market sizes never constrain; if no pair constrains the
// threshold is -infinity (full revelation is classified similar at any r).
inline double r_bar(const Network& net, const DistanceTable& dist) {
    bool any_pair = false;
    double best = std::numeric_limits<double>::infinity();
    int n = net.size();
    for (int i = 1; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (dist.d[i] == dist.d[j]) continue;
            any_pair = true;
            double ds = net.market_size[i] - net.market_size[j];
            if (ds == 0) continue;
            best = std::min(best, std::abs((dist.d[i] - dist.d[j]) / ds));
        }
    if (!any_pair) throw NoPairs("all non-shock nodes share one distance");
    if (!std::isfinite(best)) return -std::numeric_limits<double>::infinity();
    return 1.0 - best;
}

}  // namespace infodesign
