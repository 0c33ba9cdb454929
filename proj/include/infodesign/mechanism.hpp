#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "infodesign/equilibrium.hpp"
#include "infodesign/errors.hpp"
#include "infodesign/network.hpp"
#include "infodesign/prior.hpp"
#include "infodesign/pwl.hpp"

namespace infodesign {

// ---------------------------------------------------------------------------
// Mechanisms
// ---------------------------------------------------------------------------

// Interval partition of the state space; each cell either reveals the state
// or pools it to the cell's conditional mean.
struct MonotonePartitional {
    struct Cell {
        double lo, hi;
        bool pool = false;
        double atom = 0;  // E_F[S | cell] when pooling
    };
    std::vector<Cell> cells;  // ascending, covering the support

    static MonotonePartitional full_revelation(const Prior& F) {
        MonotonePartitional m;
        m.cells.push_back({F.lo(), F.hi(), false, 0});
        return m;
    }
    static MonotonePartitional no_information(const Prior& F) {
        MonotonePartitional m;
        m.cells.push_back({F.lo(), F.hi(), true, F.mean()});
        return m;
    }
    static MonotonePartitional reveal_pool_reveal(const Prior& F, double zl, double zh) {
        MonotonePartitional m;
        if (zl > F.lo()) m.cells.push_back({F.lo(), zl, false, 0});
        m.cells.push_back({zl, zh, true, F.cond_mean(zl, zh)});
        if (zh < F.hi()) m.cells.push_back({zh, F.hi(), false, 0});
        return m.canonicalized(F);
    }

    // Merge adjacent reveal cells, drop empty cells, demote degenerate pools.
    MonotonePartitional canonicalized(const Prior& F) const {
        double w = F.width();
        MonotonePartitional out;
        for (auto c : cells) {
            c.lo = std::max(c.lo, F.lo());
            c.hi = std::min(c.hi, F.hi());
            if (!(c.hi - c.lo > 0)) continue;
            if (c.pool && c.hi - c.lo < 1e-9 * w) c.pool = false;
            if (c.pool) c.atom = F.cond_mean(c.lo, c.hi);
            if (!out.cells.empty() && !out.cells.back().pool && !c.pool)
                out.cells.back().hi = c.hi;
            else
                out.cells.push_back(c);
        }
        if (out.cells.empty()) out.cells.push_back({F.lo(), F.hi(), false, 0});
        return out;
    }
};

// General interval structure: outside the listed intervals the state is
// revealed; each interval pools to one atom or to two atoms arranged as a
// double interval [a, z'] u [z'', b] -> x and [z', z''] -> y.
struct IntervalStructure {
    struct Interval {
        double a, b;
        bool double_interval = false;
        double x = 0, px = 0;        // single-atom: (x, px); double: outer atom
        double y = 0, py = 0;        // double only: inner atom
        double z_in = 0, z_out = 0;  // double only: inner cut points z', z''
    };
    std::vector<Interval> intervals;  // disjoint, ascending
};

// ---------------------------------------------------------------------------
// Posterior mean distribution G induced by a mechanism.
// ---------------------------------------------------------------------------

class PosteriorDistribution {
public:
    struct Atom {
        double z, p;
    };
    struct Segment {
        double a, b;
    };

    PosteriorDistribution(const Prior& F, std::vector<Segment> reveal, std::vector<Atom> atoms)
        : F_(&F), reveal_(std::move(reveal)), atoms_(std::move(atoms)) {
        std::sort(reveal_.begin(), reveal_.end(),
                  [](const Segment& a, const Segment& b) { return a.a < b.a; });
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& a, const Atom& b) { return a.z < b.z; });
        build_spans();
    }

    static PosteriorDistribution from_mechanism(const MonotonePartitional& m, const Prior& F) {
        std::vector<Segment> segs;
        std::vector<Atom> atoms;
        for (const auto& c : m.cells) {
            if (c.pool)
                atoms.push_back({c.atom, F.mass(c.lo, c.hi)});
            else
                segs.push_back({c.lo, c.hi});
        }
        return PosteriorDistribution(F, std::move(segs), std::move(atoms));
    }

    static PosteriorDistribution from_structure(const IntervalStructure& s, const Prior& F) {
        std::vector<Segment> segs;
        std::vector<Atom> atoms;
        double cur = F.lo();
        for (const auto& iv : s.intervals) {
            if (iv.a > cur) segs.push_back({cur, iv.a});
            if (iv.double_interval) {
                atoms.push_back({iv.x, iv.px});
                atoms.push_back({iv.y, iv.py});
            } else {
                atoms.push_back({iv.x, iv.px});
            }
            cur = iv.b;
        }
        if (cur < F.hi()) segs.push_back({cur, F.hi()});
        return PosteriorDistribution(F, std::move(segs), std::move(atoms));
    }

    static PosteriorDistribution from_atoms(const Prior& F, std::vector<Atom> atoms) {
        return PosteriorDistribution(F, {}, std::move(atoms));
    }

    const Prior& prior() const { return *F_; }
    const std::vector<Segment>& reveal_segments() const { return reveal_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    double total_mass() const {
        double t = 0;
        for (const auto& s : reveal_) t += F_->mass(s.a, s.b);
        for (const auto& a : atoms_) t += a.p;
        return t;
    }

    double mean() const {
        double m = 0;
        for (const auto& s : reveal_) m += F_->partial_mean(s.a, s.b);
        for (const auto& a : atoms_) m += a.p * a.z;
        return m;
    }

    double cdf(double z) const {
        double g = 0;
        for (const auto& s : reveal_)
            if (z > s.a) g += F_->mass(s.a, std::min(z, s.b));
        for (const auto& a : atoms_)
            if (a.z <= z) g += a.p;
        return g;
    }

    // ∫_{lo}^{s} G(z) dz
    double cdf_integral(double s) const {
        s = std::clamp(s, F_->lo(), F_->hi());
        double acc = 0;
        for (const auto& sp : spans_) {
            if (sp.u >= s) break;
            double v = std::min(sp.v, s);
            double dz = v - sp.u;
            if (dz <= 0) continue;
            acc += sp.g_at_u * dz;
            if (sp.follows_F)
                acc += F_->cdf_integral(sp.u, v) - F_->cdf(sp.u) * dz;
        }
        return acc;
    }

    // grid of structurally relevant points (atoms and reveal boundaries)
    std::vector<double> critical_points() const {
        std::vector<double> pts{F_->lo(), F_->hi()};
        for (const auto& s : reveal_) {
            pts.push_back(s.a);
            pts.push_back(s.b);
        }
        for (const auto& a : atoms_) pts.push_back(a.z);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
    }

private:
    struct Span {
        double u, v;
        double g_at_u;
        bool follows_F;
    };

    void build_spans() {
        std::vector<double> pts = critical_points();
        spans_.clear();
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            Span sp{pts[i], pts[i + 1], 0, false};
            sp.g_at_u = cdf_raw(sp.u);
            sp.follows_F = inside_reveal(0.5 * (sp.u + sp.v));
            spans_.push_back(sp);
        }
    }

    bool inside_reveal(double z) const {
        for (const auto& s : reveal_)
            if (z >= s.a && z <= s.b) return true;
        return false;
    }

    // cdf without span acceleration (used to seed spans)
    double cdf_raw(double z) const {
        double g = 0;
        for (const auto& s : reveal_)
            if (z > s.a) g += F_->mass(s.a, std::min(z, s.b));
        for (const auto& a : atoms_)
            if (a.z <= z) g += a.p;
        return g;
    }

    const Prior* F_;
    std::vector<Segment> reveal_;
    std::vector<Atom> atoms_;
    std::vector<Span> spans_;
};

// ---------------------------------------------------------------------------
// Mean-preserving-contraction feasibility check.
// ---------------------------------------------------------------------------

struct MpcReport {
    bool ok = false;
    double worst_point = 0;
    double worst_violation = 0;  // max of interior violation and endpoint gap
    double endpoint_gap = 0;
};

inline MpcReport mpc_check(const PosteriorDistribution& G, const Prior& F, double tol = 1e-8) {
    MpcReport rep;
    std::vector<double> grid = G.critical_points();
    int extra = 1000;
    for (int i = 1; i < extra; ++i) grid.push_back(F.lo() + F.width() * i / extra);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double scale = std::max(1.0, F.width());
    double worst = 0, worst_pt = F.lo();
    for (double s : grid) {
        double diff = F.cdf_integral(F.lo(), s) - G.cdf_integral(s);  // must be >= 0
        if (-diff > worst) {
            worst = -diff;
            worst_pt = s;
        }
    }
    rep.endpoint_gap = std::abs(F.cdf_integral(F.lo(), F.hi()) - G.cdf_integral(F.hi()));
    rep.worst_point = worst_pt;
    rep.worst_violation = std::max(worst, rep.endpoint_gap);
    rep.ok = worst <= tol * scale && rep.endpoint_gap <= tol * scale;
    return rep;
}

// ---------------------------------------------------------------------------
// Expected revenue of a mechanism.
// ---------------------------------------------------------------------------

// ∫_a^b R dF for piecewise-linear R, in closed form.
inline double integrate_against(const PiecewiseLinear& R, const Prior& F, double a, double b) {
    a = std::max(a, F.lo());
    b = std::min(b, F.hi());
    if (b <= a) return 0;
    const auto& z = R.breakpoints();
    double acc = 0;
    for (std::size_t p = 0; p < R.pieces(); ++p) {
        double lo_p = (p == 0) ? -std::numeric_limits<double>::infinity() : z[p];
        double hi_p = (p == R.pieces() - 1) ? std::numeric_limits<double>::infinity() : z[p + 1];
        double u = std::max(a, lo_p);
        double v = std::min(b, hi_p);
        if (v <= u) continue;
        double s = R.slope(p);
        double intercept = R.values()[p] - s * z[p];
        acc += s * F.partial_mean(u, v) + intercept * F.mass(u, v);
    }
    return acc;
}

inline double expected_revenue(const PiecewiseLinear& R, const PosteriorDistribution& G) {
    const Prior& F = G.prior();
    double acc = 0;
    for (const auto& s : G.reveal_segments()) acc += integrate_against(R, F, s.a, s.b);
    for (const auto& a : G.atoms()) acc += a.p * R.eval(a.z);
    return acc;
}

inline double expected_revenue(const PiecewiseLinear& R, const MonotonePartitional& m,
                               const Prior& F) {
    return expected_revenue(R, PosteriorDistribution::from_mechanism(m, F));
}

inline double expected_revenue(const PiecewiseLinear& R, const IntervalStructure& s,
                               const Prior& F) {
    return expected_revenue(R, PosteriorDistribution::from_structure(s, F));
}

// ---------------------------------------------------------------------------
// Threshold algorithm: the reveal-pool-reveal mechanism for single-concave-interval
// revenue functions.
// ---------------------------------------------------------------------------

struct Algorithm1Result {
    MonotonePartitional mechanism;
    double z_lo = 0, z_hi = 0;  // pooling interval (equal on full revelation)
    double z_star = 0;          // pooled posterior mean
    bool full_revelation = false;
};

inline Algorithm1Result algorithm1_thresholds(const RegimeTable& tab, const PiecewiseLinear& R,
                                              const Prior& prior,
                                              const MarketClass* classification = nullptr) {
    if (classification && classification->pattern == SizePattern::Mixed)
        throw PatternMismatch("market classification is mixed; a similar/monotone pattern is required");
    (void)tab;

    PiecewiseLinear f = R.canonicalized();
    auto s = f.slopes();
    const auto& z = f.breakpoints();
    const auto& v = f.values();
    double E = prior.mean();
    double span = prior.width();
    double tol = 1e-12 * std::max(1.0, span);

    Algorithm1Result out;
    bool nondecreasing = true;
    for (std::size_t p = 1; p < s.size(); ++p)
        if (s[p] < s[p - 1]) nondecreasing = false;
    if (nondecreasing) {
        out.z_lo = out.z_hi = out.z_star = E;
        out.full_revelation = true;
        out.mechanism = MonotonePartitional::full_revelation(prior);
        return out;
    }

    std::size_t k_lo = 0, k_hi = 0;
    for (std::size_t p = 0; p + 1 < s.size(); ++p)
        if (s[p] > s[p + 1]) {
            k_lo = p;
            break;
        }
    for (std::size_t p = s.size(); p-- > 1;)
        if (s[p - 1] > s[p]) {
            k_hi = p;
            break;
        }

    for (std::size_t j = k_lo; j <= k_hi; ++j) {
        Line g = Line::point_slope(z[j], v[j], s[j]);
        auto [A, B] = detail::dominance_interval(f, g, z[j], z[j + 1]);
        double mu = prior.cond_mean(A, B);
        if (mu <= z[j + 1] + tol) {
            if (mu >= z[j] - tol) {
                out.z_lo = A;
                out.z_hi = B;
                out.z_star = std::clamp(mu, z[j], z[j + 1]);
                out.mechanism = MonotonePartitional::reveal_pool_reveal(prior, A, B);
                return out;
            }
            // tangency lands on the kink at z[j]: sweep the slope through its
            // subdifferential until the pooled mean hits the kink
            if (j == 0) throw NumericalFailure("threshold algorithm: no kink to anchor fallback");
            double glo = s[j], ghi = s[j - 1];
            double target = z[j];
            double Af = A, Bf = B;
            for (int it = 0; it < 200 && ghi - glo > 1e-10 * std::max(1.0, std::abs(ghi)); ++it) {
                double gamma = 0.5 * (glo + ghi);
                Line gg = Line::point_slope(z[j], v[j], gamma);
                auto [Ag, Bg] = detail::dominance_interval(f, gg, z[j], z[j]);
                double m = prior.cond_mean(Ag, Bg);
                if (m < target)
                    glo = gamma;
                else
                    ghi = gamma;
                Af = Ag;
                Bf = Bg;
            }
            out.z_lo = Af;
            out.z_hi = Bf;
            out.z_star = target;
            double achieved = prior.cond_mean(Af, Bf);
            if (std::abs(achieved - target) > 1e-6 * std::max(1.0, span))
                throw NumericalFailure("threshold algorithm: pooled-mean equation not solved");
            out.mechanism = MonotonePartitional::reveal_pool_reveal(prior, Af, Bf);
            return out;
        }
    }
    throw NumericalFailure("threshold algorithm: no admissible pooling interval found");
}

// ---------------------------------------------------------------------------
// Conditions C1-C4 (optimality of monotone partitional mechanisms).
// ---------------------------------------------------------------------------

struct ConditionReport {
    bool C1 = false, C2 = false, C3 = false, C4 = false;
    std::size_t concave_interval_count = 0;
    std::vector<TangentLine> bitangents;
    std::string witness;
    bool any() const { return C1 || C2 || C3 || C4; }
};

inline ConditionReport check_conditions(const RegimeTable& tab, const PiecewiseLinear& R,
                                        const Prior& prior) {
    (void)tab;
    ConditionReport rep;
    auto list = concave_intervals(R);
    rep.concave_interval_count = list.intervals.size();
    rep.C1 = rep.concave_interval_count <= 1;

    for (std::size_t l = 0; l < list.intervals.size(); ++l)
        for (std::size_t lp = l + 1; lp < list.intervals.size(); ++lp)
            if (auto t = tangent_between(list, l, lp)) rep.bitangents.push_back(*t);
    rep.C2 = rep.bitangents.empty();

    double E = prior.mean();
    double lo = prior.lo(), hi = prior.hi();
    double tol = 1e-9 * std::max(1.0, prior.width());
    bool c3 = true, c4 = true;
    std::ostringstream wit;
    for (const auto& t : rep.bitangents) {
        Line g{t.gamma, t.lambda};
        auto [A, B] = detail::dominance_interval(list.f, g, t.x, t.y);
        bool below = t.x < E && t.y < E && B >= hi - tol;
        bool above = t.x > E && t.y > E && A <= lo + tol;
        if (!(below || above)) {
            c3 = false;
            wit << "C3 fails for tangent pair (" << t.x << "," << t.y << "); ";
        }
        // C4: every way to realize a feasible double interval must be blocked
        double zs = prior.partial_mean(A, B);
        double zt = (t.y * prior.cdf(B) - t.x * prior.cdf(A) - zs) / (t.y - t.x);
        double px = zt - prior.cdf(A);
        bool ia = prior.cond_mean(A, t.y) >= t.x - tol;
        bool ib = prior.cond_mean(t.x, B) <= t.y + tol;
        bool ic = true;
        double cell_mass = prior.cdf(B) - prior.cdf(A);
        if (px > tol && px < cell_mass - tol) {
            double Q = prior.quantile(zt);
            double lhs = (Q - t.x) * px;
            double rhs = prior.cdf_integral(A, Q) - prior.cdf(A) * (Q - A);
            ic = lhs >= rhs - tol;
        }
        if (!(ia && ib && ic)) {
            c4 = false;
            wit << "C4 fails for tangent pair (" << t.x << "," << t.y << "); ";
        }
    }
    rep.C3 = c3;
    rep.C4 = c4;
    rep.witness = wit.str();
    return rep;
}

// ---------------------------------------------------------------------------
// Duality certificate: verify (nu, G) for a proposed mechanism.
// ---------------------------------------------------------------------------

namespace detail {

// Replace f on [a, b] by the affine function g, keeping f outside.
inline PiecewiseLinear splice_line(const PiecewiseLinear& f, double a, double b, const Line& g,
                                   const std::vector<double>& touch_pts) {
    double tol = 1e-12 * std::max(1.0, f.hi() - f.lo());
    std::vector<double> z, v;
    auto push = [&](double zz, double vv) {
        if (!z.empty() && zz <= z.back() + tol) return;
        z.push_back(zz);
        v.push_back(vv);
    };
    for (std::size_t i = 0; i < f.breakpoints().size() && f.breakpoints()[i] < a - tol; ++i)
        push(f.breakpoints()[i], f.values()[i]);
    push(a, a > f.lo() + tol ? f.eval(a) : g(a));
    for (double t : touch_pts)
        if (t > a + tol && t < b - tol) push(t, g(t));
    push(b, b < f.hi() - tol ? f.eval(b) : g(b));
    for (std::size_t i = 0; i < f.breakpoints().size(); ++i)
        if (f.breakpoints()[i] > b + tol) push(f.breakpoints()[i], f.values()[i]);
    if (z.size() < 2) return f;
    return PiecewiseLinear(std::move(z), std::move(v));
}

}  // namespace detail

// Upper closure for a whole mechanism: every pooled cell contributes one
// affine piece through its atom.
inline PiecewiseLinear upper_closure(const PiecewiseLinear& R, const MonotonePartitional& m,
                                     const Prior& F) {
    PiecewiseLinear nu = R;
    double w = F.width();
    for (const auto& c : m.cells)
        if (c.pool && c.hi - c.lo > 1e-9 * w) nu = upper_closure_with_pool(nu, c.lo, c.hi, c.atom);
    return nu;
}

inline PiecewiseLinear upper_closure(const PiecewiseLinear& R, const IntervalStructure& s,
                                     const Prior& F) {
    PiecewiseLinear nu = R;
    double w = F.width();
    for (const auto& iv : s.intervals) {
        if (!(iv.b - iv.a > 1e-9 * w)) continue;
        if (iv.double_interval) {
            Line g = Line::through(iv.x, R.eval(iv.x), iv.y, R.eval(iv.y));
            nu = detail::splice_line(nu, iv.a, iv.b, g, {iv.x, iv.y});
        } else {
            nu = upper_closure_with_pool(nu, iv.a, iv.b, iv.x);
        }
    }
    return nu;
}

struct Certificate {
    bool ok = false;
    double max_violation = 0;
    bool nu_convex = false;
    double dominance_violation = 0;  // max(R - nu)
    double support_violation = 0;    // max |nu - R| on supp(G)
    double integral_gap = 0;         // |∫nu dG - ∫nu dF|
    double mpc_violation = 0;
    PiecewiseLinear nu;
};

inline Certificate certify(const PiecewiseLinear& R, const PiecewiseLinear& nu,
                           const PosteriorDistribution& G, double tol = 1e-7) {
    const Prior& F = G.prior();
    Certificate cert;
    cert.nu = nu;

    double scale = 1.0;
    for (double x : R.values()) scale = std::max(scale, std::abs(x));

    cert.nu_convex = is_convex(nu, 1e-9);

    std::vector<double> grid = G.critical_points();
    for (double z : R.breakpoints()) grid.push_back(z);
    for (double z : nu.breakpoints()) grid.push_back(z);
    for (int i = 1; i < 1000; ++i) grid.push_back(F.lo() + F.width() * i / 1000);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    for (double z : grid)
        cert.dominance_violation = std::max(cert.dominance_violation, R.eval(z) - nu.eval(z));

    for (const auto& seg : G.reveal_segments())
        for (double z : grid)
            if (z >= seg.a && z <= seg.b)
                cert.support_violation =
                    std::max(cert.support_violation, std::abs(nu.eval(z) - R.eval(z)));
    for (const auto& a : G.atoms())
        cert.support_violation =
            std::max(cert.support_violation, std::abs(nu.eval(a.z) - R.eval(a.z)));

    double int_G = expected_revenue(nu, G);  // ∫ nu dG (same quadrature path)
    double int_F = integrate_against(nu, F, F.lo(), F.hi());
    cert.integral_gap = std::abs(int_G - int_F);

    auto mpc = mpc_check(G, F);
    cert.mpc_violation = mpc.worst_violation;

    cert.max_violation = std::max({cert.dominance_violation / scale, cert.support_violation / scale,
                                   cert.integral_gap / scale, cert.mpc_violation});
    cert.ok = cert.nu_convex && cert.max_violation <= tol;
    return cert;
}

inline Certificate duality_certificate(const PiecewiseLinear& R, const MonotonePartitional& m,
                                       const Prior& F, double tol = 1e-7) {
    return certify(R, upper_closure(R, m, F), PosteriorDistribution::from_mechanism(m, F), tol);
}

inline Certificate duality_certificate(const PiecewiseLinear& R, const IntervalStructure& s,
                                       const Prior& F, double tol = 1e-7) {
    return certify(R, upper_closure(R, s, F), PosteriorDistribution::from_structure(s, F), tol);
}

}  // namespace infodesign
