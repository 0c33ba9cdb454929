#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "infodesign/detail/simplex.hpp"
#include "infodesign/equilibrium.hpp"
#include "infodesign/errors.hpp"
#include "infodesign/mechanism.hpp"
#include "infodesign/prior.hpp"
#include "infodesign/pwl.hpp"

namespace infodesign {

// ---------------------------------------------------------------------------
// Revenue oracle: evaluate R at a posterior mean and integrate R against the
// prior over an interval.  Closed form when R is piecewise linear, solver
// backed otherwise.
// ---------------------------------------------------------------------------

struct RevenueOracle {
    std::function<double(double)> at;
    std::function<double(double, double)> integral;  // ∫_a^b R dF

    static RevenueOracle from_pwl(const PiecewiseLinear& R, const Prior& F) {
        RevenueOracle o;
        o.at = [R](double z) { return R.eval(z); };
        o.integral = [R, &F](double a, double b) { return integrate_against(R, F, a, b); };
        return o;
    }

    // Single-shock solver backend: node 0's intercept is the posterior mean.
    static RevenueOracle from_solver(const Network& net, const Prior& F) {
        RevenueOracle o;
        o.at = [&net](double z) {
            auto t = intercepts_single_shock(net, z);
            auto sp = solve_potential(net, t);
            return revenue_at(net, t, sp.q);
        };
        o.integral = [o, &F](double a, double b) {
            return detail::adaptive_simpson([&](double z) { return o.at(z) * F.pdf(z); }, a, b,
                                            1e-10);
        };
        return o;
    }
};

// ---------------------------------------------------------------------------
// Prop-8 style convex program over per-regime probability masses p_k and
// mass-weighted means y_k.  Linear objective via the perspective identity;
// the majorization constraint is enforced by lazy cutting planes on the
// concave top-quantile integral h(u) = ∫_{1-u}^{1} F^{-1}.
// ---------------------------------------------------------------------------

struct RegimeAllocation {
    struct Entry {
        int k;
        double lo, hi;  // regime span
        double p, y;
    };
    std::vector<Entry> entries;  // ascending in state
    double objective = 0;
};

inline RegimeAllocation solve_prop8(const RegimeTable& tab, const PiecewiseLinear& R,
                                    const Prior& prior, double grid_eps = 1.0 / 64) {
    if (!(grid_eps > 0 && grid_eps <= 0.5)) throw DomainError("grid_eps must lie in (0, 0.5]");
    const auto& regs = tab.regimes;
    const std::size_t K = regs.size();
    const double E = prior.mean();

    auto h = [&](double u) {  // ∫_{1-u}^1 F^{-1}(x) dx
        if (u <= 0) return 0.0;
        if (u >= 1) return E;
        return prior.partial_mean(prior.quantile(1 - u), prior.hi());
    };
    auto h_slope = [&](double u) { return prior.quantile(1 - std::clamp(u, 0.0, 1.0)); };

    // variables: p_0..p_{K-1}, w_0..w_{K-1} with y_k = w_k + lo_k p_k
    const std::size_t nv = 2 * K;
    std::vector<double> c(nv, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double a = (R.eval(regs[k].hi) - R.eval(regs[k].lo)) / (regs[k].hi - regs[k].lo);
        double b = R.eval(regs[k].lo) - a * regs[k].lo;
        c[k] = a * regs[k].lo + b;  // coefficient of p_k
        c[K + k] = a;               // coefficient of w_k
    }

    std::vector<std::vector<double>> A_ub, A_eq;
    std::vector<double> b_ub, b_eq;

    // brackets: w_k <= (hi_k - lo_k) p_k
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> row(nv, 0.0);
        row[K + k] = 1.0;
        row[k] = -(regs[k].hi - regs[k].lo);
        A_ub.push_back(row);
        b_ub.push_back(0.0);
    }
    // sum p = 1
    {
        std::vector<double> row(nv, 0.0);
        for (std::size_t k = 0; k < K; ++k) row[k] = 1.0;
        A_eq.push_back(row);
        b_eq.push_back(1.0);
    }
    // sum y = E (mean preservation)
    {
        std::vector<double> row(nv, 0.0);
        for (std::size_t k = 0; k < K; ++k) {
            row[k] = regs[k].lo;
            row[K + k] = 1.0;
        }
        A_eq.push_back(row);
        b_eq.push_back(E);
    }

    // suffix-majorization cuts: for every suffix s (regimes j >= s),
    //   sum y_j <= h(sum p_j);  linearized at u0 as
    //   sum y_j - h'(u0) sum p_j <= h(u0) - u0 h'(u0)
    auto add_cut = [&](std::size_t s, double u0) {
        u0 = std::clamp(u0, 1e-12, 1.0);
        double g = h_slope(u0);
        std::vector<double> row(nv, 0.0);
        for (std::size_t j = s; j < K; ++j) {
            row[j] = regs[j].lo - g;
            row[K + j] = 1.0;
        }
        A_ub.push_back(row);
        b_ub.push_back(h(u0) - u0 * g);
    };
    int seeds = std::min(17, std::max(3, int(std::lround(1.0 / grid_eps))));
    for (std::size_t s = 0; s < K; ++s) {
        for (int i = 1; i <= seeds; ++i) add_cut(s, double(i) / seeds);
    }

    detail::LpResult lp;
    double scale = std::max(1.0, std::abs(E));
    for (int round = 0; round < 200; ++round) {
        lp = detail::solve_lp(c, A_ub, b_ub, A_eq, b_eq);
        if (!lp.feasible) throw SolverStall("prop8 LP infeasible (should not happen)");
        // check the true concave constraints on every suffix
        double worst = 0;
        std::vector<std::pair<std::size_t, double>> cuts;
        for (std::size_t s = 0; s < K; ++s) {
            double sp = 0, sy = 0;
            for (std::size_t j = s; j < K; ++j) {
                sp += lp.x[j];
                sy += lp.x[K + j] + regs[j].lo * lp.x[j];
            }
            double viol = sy - h(sp);
            if (viol > worst) worst = viol;
            if (viol > 1e-10 * scale && sp > 1e-12 && sp < 1 - 1e-12) cuts.emplace_back(s, sp);
        }
        if (worst <= 1e-8 * scale) break;
        if (cuts.empty()) break;
        for (auto& [s, u0] : cuts) add_cut(s, u0);
        if (round == 199) throw SolverStall("prop8 cutting-plane refinement did not converge");
    }

    RegimeAllocation alloc;
    alloc.objective = 0;
    for (std::size_t j = 0; j < nv; ++j) alloc.objective += c[j] * lp.x[j];
    for (std::size_t k = 0; k < K; ++k) {
        double p = std::max(0.0, lp.x[k]);
        double y = lp.x[K + k] + regs[k].lo * lp.x[k];
        alloc.entries.push_back({regs[k].k, regs[k].lo, regs[k].hi, p, y});
    }
    return alloc;
}

// ---------------------------------------------------------------------------
// Interval-structure recovery from an optimal (p, y) allocation: greedy
// quantile sweep; runs between tight majorization prefixes become intervals,
// two-atom runs become double intervals.
// ---------------------------------------------------------------------------

struct RecoveredStructure {
    IntervalStructure structure;
    double max_residual = 0;
};

namespace detail {

// Exact boundaries of a single-atom pool: the pool is the maximal interval on
// which some line through (z*, R(z*)) with an admissible slope dominates R,
// chosen so that the pooled conditional mean lands back on z*.  This removes
// the square-root-of-tolerance fuzz a cutting-plane solution carries in its
// value-flat directions.
inline bool refine_single_pool(const PiecewiseLinear& R, const Prior& F, double z_star, double& a,
                               double& b) {
    PiecewiseLinear f = R.canonicalized();
    const auto& z = f.breakpoints();
    double span = std::max(1.0, F.width());
    double kink_tol = 1e-5 * span;

    double g_lo, g_hi;  // admissible slope range of dominating lines at z*
    std::size_t at_kink = z.size();
    for (std::size_t j = 1; j + 1 < z.size(); ++j)
        if (std::abs(z_star - z[j]) <= kink_tol) at_kink = j;
    if (at_kink < z.size()) {
        g_lo = f.slope(at_kink);      // right slope
        g_hi = f.slope(at_kink - 1);  // left slope
        if (g_hi < g_lo) return false;  // convex kink: nothing dominates
    } else {
        std::size_t p = 0;
        while (p + 1 < f.pieces() && z[p + 1] <= z_star) ++p;
        g_lo = g_hi = f.slope(p);
    }
    double anchor = at_kink < z.size() ? z[at_kink] : z_star;
    double v_anchor = f.eval(anchor);

    auto pool_of = [&](double gamma) {
        Line g = Line::point_slope(anchor, v_anchor, gamma);
        return dominance_interval(f, g, anchor, anchor);
    };
    double lo = g_lo, hi = g_hi;
    double A = a, B = b;
    for (int it = 0; it < 200; ++it) {
        double gamma = 0.5 * (lo + hi);
        auto [Ag, Bg] = pool_of(gamma);
        double mu = F.cond_mean(Ag, Bg);
        A = Ag;
        B = Bg;
        if (hi - lo <= 1e-13 * std::max(1.0, std::abs(hi))) break;
        if (mu < z_star)
            lo = gamma;
        else
            hi = gamma;
    }
    if (std::abs(F.cond_mean(A, B) - z_star) > 1e-7 * span) return false;
    a = A;
    b = B;
    return true;
}

}  // namespace detail

inline RecoveredStructure recover_structure(const RegimeAllocation& alloc, const Prior& prior,
                                            const PiecewiseLinear* R = nullptr) {
    const double E = prior.mean();
    double scale = std::max({1.0, std::abs(E), prior.width()});
    const double p_tol = 1e-9;
    const double tight_tol = 1e-7 * scale;

    struct AtomRec {
        double z, p, y;
        double span_lo, span_hi;  // union of source-regime spans
    };
    std::vector<AtomRec> atoms;
    for (const auto& e : alloc.entries) {
        if (e.p <= p_tol) continue;
        double z = std::clamp(e.y / e.p, e.lo, e.hi);
        if (!atoms.empty() && std::abs(z - atoms.back().z) <= 1e-7 * scale) {
            auto& a = atoms.back();
            double zp = (a.z * a.p + z * e.p) / (a.p + e.p);
            a.z = zp;
            a.p += e.p;
            a.y += e.y;
            a.span_hi = e.hi;
        } else {
            atoms.push_back({z, e.p, e.y, e.lo, e.hi});
        }
    }

    auto bottom_quantile_mean = [&](double P) {  // ∫_0^P F^{-1}
        if (P <= 0) return 0.0;
        if (P >= 1) return E;
        return prior.partial_mean(prior.lo(), prior.quantile(P));
    };

    RecoveredStructure out;
    double P = 0, Y = 0;
    std::vector<AtomRec> run;
    double run_start_P = 0;
    auto flush_run = [&](double end_P) {
        if (run.empty()) return;
        double a = prior.quantile(run_start_P);
        double b = prior.quantile(end_P);
        if (run.size() == 1) {
            const AtomRec& at = run[0];
            double m = prior.cond_mean(a, b);
            out.max_residual = std::max(out.max_residual, std::abs(m - at.z));
            if (std::abs(m - at.z) > 1e-6 * scale)
                throw RecoveryMismatch("single-atom interval mean mismatch");
            // An interval whose pooling is revenue-neutral is canonically
            // revealed: either it sits inside one affine regime, or (when the
            // revenue function is available) the Jensen gap vanishes exactly.
            bool droppable;
            if (R) {
                double gap = integrate_against(*R, prior, a, b) - at.p * R->eval(at.z);
                droppable = std::abs(gap) <= 1e-7 * scale;
            } else {
                droppable =
                    a >= at.span_lo - 1e-5 * scale && b <= at.span_hi + 1e-5 * scale;
            }
            if (!droppable) {
                IntervalStructure::Interval iv;
                iv.a = a;
                iv.b = b;
                iv.x = at.z;
                iv.px = at.p;
                out.structure.intervals.push_back(iv);
            }
            // inside one regime: pooling is revenue-equivalent to revealing,
            // so the canonical structure reveals it
        } else if (run.size() == 2) {
            const AtomRec& ax = run[0];
            const AtomRec& ay = run[1];
            double py = ay.p;
            // find z' with E[z', z''] = y where z'' = F^{-1}(F(z') + p_y)
            double lo_cut = a, hi_cut = prior.quantile(std::max(0.0, prior.cdf(b) - py));
            double zp = 0.5 * (lo_cut + hi_cut);
            for (int it = 0; it < 200; ++it) {
                zp = 0.5 * (lo_cut + hi_cut);
                double zpp = prior.quantile(prior.cdf(zp) + py);
                double m = prior.cond_mean(zp, zpp);
                if (m < ay.z)
                    lo_cut = zp;
                else
                    hi_cut = zp;
                if (hi_cut - lo_cut <= 1e-13 * scale) break;
            }
            double zpp = prior.quantile(prior.cdf(zp) + py);
            IntervalStructure::Interval iv;
            iv.a = a;
            iv.b = b;
            iv.double_interval = true;
            iv.x = ax.z;
            iv.px = ax.p;
            iv.y = ay.z;
            iv.py = ay.p;
            iv.z_in = zp;
            iv.z_out = zpp;
            // residuals of the (p_x, p_y) system
            double mass = prior.mass(a, b);
            double r1 = std::abs(ax.p + ay.p - mass);
            double r2 = std::abs(ax.z * ax.p + ay.z * ay.p - prior.partial_mean(a, b));
            double px_mass = prior.mass(a, zp) + prior.mass(zpp, b);
            double x_mean = px_mass > 0
                                ? (prior.partial_mean(a, zp) + prior.partial_mean(zpp, b)) / px_mass
                                : ax.z;
            double r3 = std::abs(x_mean - ax.z);
            double r4 = std::abs(prior.cond_mean(zp, zpp) - ay.z);
            out.max_residual = std::max({out.max_residual, r1, r2, r3, r4});
            if (out.max_residual > 1e-6 * scale)
                throw RecoveryMismatch("double-interval system residual too large");
            out.structure.intervals.push_back(iv);
        } else {
            throw RecoveryMismatch("run of " + std::to_string(run.size()) +
                                   " atoms between tight prefixes; only single and double "
                                   "interval structures are recoverable");
        }
        run.clear();
    };

    for (const auto& at : atoms) {
        if (run.empty()) run_start_P = P;
        run.push_back(at);
        P += at.p;
        Y += at.y;
        double slack = Y - bottom_quantile_mean(P);
        if (std::abs(slack) <= tight_tol) {
            flush_run(P);
        }
    }
    if (!run.empty()) flush_run(std::min(P, 1.0));

    // polish single pools to their exact tangent boundaries when the revenue
    // function is available, keeping intervals disjoint
    if (R) {
        auto& ivs = out.structure.intervals;
        for (std::size_t i = 0; i < ivs.size(); ++i) {
            if (ivs[i].double_interval) continue;
            double a = ivs[i].a, b = ivs[i].b;
            if (!detail::refine_single_pool(*R, prior, ivs[i].x, a, b)) continue;
            double left_lim = (i == 0) ? prior.lo() : ivs[i - 1].b;
            double right_lim = (i + 1 == ivs.size()) ? prior.hi() : ivs[i + 1].a;
            if (a < left_lim - 1e-12 || b > right_lim + 1e-12) continue;
            ivs[i].a = std::max(a, left_lim);
            ivs[i].b = std::min(b, right_lim);
            ivs[i].px = prior.mass(ivs[i].a, ivs[i].b);
        }
    }

    // feasibility of the recovered posterior
    auto G = PosteriorDistribution::from_structure(out.structure, prior);
    auto mpc = mpc_check(G, prior);
    if (!mpc.ok) throw RecoveryMismatch("recovered structure fails the MPC feasibility check");
    if (std::abs(G.mean() - E) > 1e-7 * scale)
        throw RecoveryMismatch("recovered structure does not preserve the mean");
    return out;
}

// ---------------------------------------------------------------------------
// Quantile-grid dynamic program for the best partitional mechanism.
// ---------------------------------------------------------------------------

struct QuantileGrid {
    double eps = 0;
    std::vector<double> cutoffs;  // nondecreasing, first = lo, last = hi
};

inline QuantileGrid build_quantile_grid(const Prior& prior, double eps) {
    if (!(eps > 0 && eps <= 0.5)) throw DomainError("eps must lie in (0, 0.5]");
    QuantileGrid g;
    g.eps = eps;
    long L = long(std::floor(1.0 / eps + 1e-9));
    double tol = 1e-12 * std::max(1.0, prior.width());
    for (long l = 0; l <= L; ++l) {
        double c = prior.quantile(eps * double(l));
        if (g.cutoffs.empty() || c > g.cutoffs.back() + tol) g.cutoffs.push_back(c);
    }
    if (g.cutoffs.back() < prior.hi() - tol) g.cutoffs.push_back(prior.hi());
    if (g.cutoffs.front() > prior.lo() + tol) g.cutoffs.insert(g.cutoffs.begin(), prior.lo());
    return g;
}

struct PartitionValue {
    MonotonePartitional mechanism;
    double value = 0;
    std::vector<double> cutoffs;  // grid the DP ran on
    std::vector<double> bellman;  // V(l) per cutoff
};

// Exact DP over a fixed cutoff set: every cell independently chooses the
// better of pooling and revealing, the Bellman recursion picks the cutoffs.
inline PartitionValue dp_on_grid(const RevenueOracle& oracle, const Prior& prior,
                                 const std::vector<double>& cutoffs) {
    const std::size_t L = cutoffs.size();
    if (L < 2) throw DomainError("cutoff grid needs at least the two support endpoints");

    // prefix integrals for reveal values
    std::vector<double> I(L, 0.0);
    for (std::size_t l = 1; l < L; ++l)
        I[l] = I[l - 1] + oracle.integral(cutoffs[l - 1], cutoffs[l]);

    auto w_pool = [&](std::size_t a, std::size_t b) {
        double mass = prior.mass(cutoffs[a], cutoffs[b]);
        if (mass <= 0) return 0.0;
        return mass * oracle.at(prior.cond_mean(cutoffs[a], cutoffs[b]));
    };

    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> V(L, neg_inf);
    std::vector<std::size_t> arg(L, 0);
    std::vector<char> pooled(L, 0);
    V[0] = 0;
    for (std::size_t l = 1; l < L; ++l) {
        for (std::size_t j = 0; j < l; ++j) {
            double reveal = I[l] - I[j];
            double pool = w_pool(j, l);
            bool use_pool = pool > reveal;
            double w = use_pool ? pool : reveal;
            if (V[j] + w > V[l]) {
                V[l] = V[j] + w;
                arg[l] = j;
                pooled[l] = use_pool;
            }
        }
    }

    PartitionValue out;
    out.value = V[L - 1];
    out.cutoffs = cutoffs;
    out.bellman = V;
    std::vector<MonotonePartitional::Cell> cells;
    std::size_t l = L - 1;
    while (l > 0) {
        std::size_t j = arg[l];
        MonotonePartitional::Cell c;
        c.lo = cutoffs[j];
        c.hi = cutoffs[l];
        c.pool = pooled[l];
        if (c.pool) c.atom = prior.cond_mean(c.lo, c.hi);
        cells.push_back(c);
        l = j;
    }
    std::reverse(cells.begin(), cells.end());
    out.mechanism.cells = std::move(cells);
    out.mechanism = out.mechanism.canonicalized(prior);
    return out;
}

inline PartitionValue dp_partitional(const RevenueOracle& oracle, const Prior& prior, double eps) {
    auto grid = build_quantile_grid(prior, eps);
    return dp_on_grid(oracle, prior, grid.cutoffs);
}

// Exhaustive test oracle over the identical family (cutoff subsets x
// per-cell reveal/pool choice).
inline PartitionValue brute_force_partitional(const RevenueOracle& oracle, const Prior& prior,
                                              const std::vector<double>& cutoffs) {
    std::vector<double> interior;
    double tol = 1e-12 * std::max(1.0, prior.width());
    for (double c : cutoffs)
        if (c > prior.lo() + tol && c < prior.hi() - tol) interior.push_back(c);
    std::sort(interior.begin(), interior.end());
    if (interior.size() > 18) throw GridTooLarge("brute force supports at most 18 cutoffs");

    std::vector<double> pts{prior.lo()};
    pts.insert(pts.end(), interior.begin(), interior.end());
    pts.push_back(prior.hi());
    const std::size_t P = pts.size();

    // cache pair values
    std::vector<std::vector<double>> wbest(P, std::vector<double>(P, 0.0));
    std::vector<std::vector<char>> wpool(P, std::vector<char>(P, 0));
    for (std::size_t a = 0; a < P; ++a)
        for (std::size_t b = a + 1; b < P; ++b) {
            double reveal = oracle.integral(pts[a], pts[b]);
            double mass = prior.mass(pts[a], pts[b]);
            double pool = mass > 0 ? mass * oracle.at(prior.cond_mean(pts[a], pts[b])) : 0.0;
            wpool[a][b] = pool > reveal;
            wbest[a][b] = std::max(pool, reveal);
        }

    double best = -std::numeric_limits<double>::infinity();
    unsigned long best_mask = 0;
    const unsigned long masks = 1ul << interior.size();
    for (unsigned long mask = 0; mask < masks; ++mask) {
        double v = 0;
        std::size_t prev = 0;
        for (std::size_t i = 0; i < interior.size(); ++i)
            if (mask & (1ul << i)) {
                v += wbest[prev][i + 1];
                prev = i + 1;
            }
        v += wbest[prev][P - 1];
        if (v > best) {
            best = v;
            best_mask = mask;
        }
    }

    PartitionValue out;
    out.value = best;
    std::size_t prev = 0;
    auto emit = [&](std::size_t a, std::size_t b) {
        MonotonePartitional::Cell c;
        c.lo = pts[a];
        c.hi = pts[b];
        c.pool = wpool[a][b];
        if (c.pool) c.atom = prior.cond_mean(c.lo, c.hi);
        out.mechanism.cells.push_back(c);
    };
    for (std::size_t i = 0; i < interior.size(); ++i)
        if (best_mask & (1ul << i)) {
            emit(prev, i + 1);
            prev = i + 1;
        }
    emit(prev, P - 1);
    out.mechanism = out.mechanism.canonicalized(prior);
    return out;
}

// ---------------------------------------------------------------------------
// Scenario-based multi-shock design: reveal the scenario, then run the
// single-dimensional DP per scenario on its intensity distribution.
// ---------------------------------------------------------------------------

struct Scenario {
    double rho = 1.0;            // scenario probability
    std::vector<double> nu;      // shock direction over nodes
    Prior theta;                 // intensity distribution

    Scenario(double rho_, std::vector<double> nu_, Prior theta_)
        : rho(rho_), nu(std::move(nu_)), theta(std::move(theta_)) {}
};

struct ScenarioDesign {
    std::vector<PartitionValue> per_scenario;
    double total_value = 0;
};

// Price intercept base in scenario mode: the shock node carries no intrinsic
// market size, all demand there arrives through the shock term.
inline std::vector<double> scenario_base_intercepts(const Network& net) {
    std::vector<double> base(net.market_size.begin(), net.market_size.end());
    base[0] = 0.0;
    return base;
}

inline RevenueOracle scenario_oracle(const Network& net, const Scenario& sc) {
    if (int(sc.nu.size()) != net.size()) throw ConfigError("scenario shock vector size mismatch");
    RevenueOracle o;
    auto base = scenario_base_intercepts(net);
    o.at = [&net, &sc, base](double m) {
        std::vector<double> t(base);
        for (int i = 0; i < net.size(); ++i) t[i] += m * sc.nu[i];
        auto sp = solve_potential(net, t);
        return revenue_at(net, t, sp.q);
    };
    o.integral = [o, &sc](double a, double b) {
        return detail::adaptive_simpson([&](double z) { return o.at(z) * sc.theta.pdf(z); }, a, b,
                                        1e-10);
    };
    return o;
}

inline ScenarioDesign dp_multi_scenario(const Network& net, const std::vector<Scenario>& scenarios,
                                        double eps) {
    double rho_sum = 0;
    for (const auto& sc : scenarios) rho_sum += sc.rho;
    if (std::abs(rho_sum - 1.0) > 1e-9)
        throw ConfigError("scenario probabilities must sum to 1");
    ScenarioDesign out;
    for (const auto& sc : scenarios) {
        auto oracle = scenario_oracle(net, sc);
        out.per_scenario.push_back(dp_partitional(oracle, sc.theta, eps));
        out.total_value += sc.rho * out.per_scenario.back().value;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Value of information.
// ---------------------------------------------------------------------------

enum class DesignMethod { Algorithm1, Prop8, Dp };

inline double value_of_information(const RegimeTable& tab, const PiecewiseLinear& R,
                                   const Prior& prior, DesignMethod method,
                                   double eps = 1.0 / 256) {
    double no_info = R.eval(prior.mean());
    double opt = 0;
    switch (method) {
        case DesignMethod::Algorithm1: {
            auto res = algorithm1_thresholds(tab, R, prior);
            opt = expected_revenue(R, res.mechanism, prior);
            break;
        }
        case DesignMethod::Prop8:
            opt = solve_prop8(tab, R, prior).objective;
            break;
        case DesignMethod::Dp:
            opt = dp_partitional(RevenueOracle::from_pwl(R, prior), prior, eps).value;
            break;
    }
    return opt - no_info;
}

}  // namespace infodesign
