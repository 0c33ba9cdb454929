#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "infodesign/errors.hpp"

namespace infodesign {

struct Line {
    double slope = 0, intercept = 0;
    double operator()(double z) const { return slope * z + intercept; }
    static Line through(double x0, double y0, double x1, double y1) {
        Line g;
        g.slope = (y1 - y0) / (x1 - x0);
        g.intercept = y0 - g.slope * x0;
        return g;
    }
    static Line point_slope(double x0, double y0, double slope) {
        return Line{slope, y0 - slope * x0};
    }
};

// Continuous piecewise-linear function stored as (breakpoint, value) pairs.
// Continuity is structural: there are no per-piece intercepts to drift apart.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> z, std::vector<double> v)
        : z_(std::move(z)), v_(std::move(v)) {
        if (z_.size() != v_.size() || z_.size() < 2)
            throw DomainError("piecewise-linear function needs matching breakpoints/values, >= 2");
        for (std::size_t i = 1; i < z_.size(); ++i)
            if (!(z_[i] > z_[i - 1])) throw DomainError("breakpoints must be strictly increasing");
    }

    const std::vector<double>& breakpoints() const { return z_; }
    const std::vector<double>& values() const { return v_; }
    double lo() const { return z_.front(); }
    double hi() const { return z_.back(); }
    std::size_t pieces() const { return z_.size() - 1; }

    double slope(std::size_t piece) const {
        return (v_[piece + 1] - v_[piece]) / (z_[piece + 1] - z_[piece]);
    }

    std::vector<double> slopes() const {
        std::vector<double> s(pieces());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = slope(i);
        return s;
    }

    // Exact at breakpoints; end pieces extend linearly outside the domain.
    double eval(double z) const {
        auto it = std::lower_bound(z_.begin(), z_.end(), z);
        if (it != z_.end() && *it == z) return v_[std::size_t(it - z_.begin())];
        std::size_t p;
        if (it == z_.begin())
            p = 0;
        else if (it == z_.end())
            p = pieces() - 1;
        else
            p = std::size_t(it - z_.begin()) - 1;
        return v_[p] + slope(p) * (z - z_[p]);
    }

    double operator()(double z) const { return eval(z); }

    // Merges kinks whose adjacent slopes agree to relative tolerance, so that
    // every remaining interior kink is strictly convex or strictly concave.
    PiecewiseLinear canonicalized(double rel_tol = 1e-12) const {
        std::vector<double> z{z_.front()}, v{v_.front()};
        for (std::size_t j = 1; j + 1 < z_.size(); ++j) {
            double sl = (v_[j] - v.back()) / (z_[j] - z.back());
            double sr = (v_[j + 1] - v_[j]) / (z_[j + 1] - z_[j]);
            if (!slopes_equal(sl, sr, rel_tol)) {
                z.push_back(z_[j]);
                v.push_back(v_[j]);
            }
        }
        z.push_back(z_.back());
        v.push_back(v_.back());
        return PiecewiseLinear(std::move(z), std::move(v));
    }

    PiecewiseLinear negated() const {
        std::vector<double> v(v_);
        for (auto& x : v) x = -x;
        return PiecewiseLinear(z_, v);
    }

    std::string to_csv() const {
        std::ostringstream os;
        os.precision(12);
        os << "z,value\n";
        for (std::size_t i = 0; i < z_.size(); ++i) os << z_[i] << "," << v_[i] << "\n";
        return os.str();
    }

    static bool slopes_equal(double a, double b, double rel_tol = 1e-12) {
        return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
    }

private:
    std::vector<double> z_, v_;
};

inline bool is_convex(const PiecewiseLinear& f, double rel_tol = 1e-12) {
    auto s = f.slopes();
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] < s[i - 1] && !PiecewiseLinear::slopes_equal(s[i], s[i - 1], rel_tol)) return false;
    return true;
}

inline Line chord(const PiecewiseLinear& f, double a, double b) {
    return Line::through(a, f.eval(a), b, f.eval(b));
}

// Maximal kink range on which the function is concave, strictly so at both
// ends.  Indices refer to breakpoints of the canonicalized function.
struct ConcaveInterval {
    std::size_t first_kink, last_kink;  // breakpoint indices, first <= last
    double a, b;                        // z-values of those kinks
};

struct ConcaveIntervalList {
    PiecewiseLinear f;  // canonicalized copy the indices refer to
    std::vector<ConcaveInterval> intervals;
};

inline ConcaveIntervalList concave_intervals(const PiecewiseLinear& raw, double rel_tol = 1e-12) {
    ConcaveIntervalList out{raw.canonicalized(rel_tol), {}};
    const auto& f = out.f;
    auto s = f.slopes();
    std::size_t j = 1;
    while (j + 1 <= s.size()) {
        if (j < s.size() && s[j] < s[j - 1]) {  // strictly concave kink (post-canonicalization)
            std::size_t first = j;
            while (j < s.size() && s[j] < s[j - 1]) ++j;
            out.intervals.push_back(
                {first, j - 1, f.breakpoints()[first], f.breakpoints()[j - 1]});
        } else {
            ++j;
        }
    }
    return out;
}

struct TangentLine {
    double gamma, lambda;  // g(z) = gamma z + lambda
    double x, y;           // touch points, x < y
    std::size_t ell, ell_prime;
    double operator()(double z) const { return gamma * z + lambda; }
};

namespace detail {

// Subdifferential-style slope range of lines through breakpoint j that stay
// locally above f.  At a concave kink this is [right slope, left slope].
inline std::pair<double, double> touch_slope_range(const PiecewiseLinear& f, std::size_t j) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    if (j > 0) lo = f.slope(j - 1);                   // need gamma >= left slope? see below
    if (j < f.pieces()) hi = f.slope(j);
    // for a line above a concave kink: slope between right and left slopes
    return {std::min(lo, hi), std::max(lo, hi)};
}

inline bool line_dominates_range(const PiecewiseLinear& f, const Line& g, std::size_t j0,
                                 std::size_t j1, double tol) {
    for (std::size_t j = j0; j <= j1; ++j)
        if (g(f.breakpoints()[j]) < f.values()[j] - tol) return false;
    return true;
}

}  // namespace detail

// Unique bitangent between concave intervals ell < ell_prime, when it exists.
// The search is exact: candidate touch points are kinks, and a candidate pair
// is accepted iff the connecting line lies in both kinks' slope ranges and
// dominates the function over both intervals.
inline std::optional<TangentLine> tangent_between(const ConcaveIntervalList& list, std::size_t ell,
                                                  std::size_t ell_prime, double tol = 1e-9) {
    if (ell >= ell_prime || ell_prime >= list.intervals.size()) return std::nullopt;
    const auto& f = list.f;
    const auto& I = list.intervals[ell];
    const auto& J = list.intervals[ell_prime];
    double scale = 1.0;
    for (double v : f.values()) scale = std::max(scale, std::abs(v));
    double vt = tol * scale;
    for (std::size_t jx = I.first_kink; jx <= I.last_kink; ++jx) {
        for (std::size_t jy = J.first_kink; jy <= J.last_kink; ++jy) {
            double x = f.breakpoints()[jx], y = f.breakpoints()[jy];
            Line g = Line::through(x, f.values()[jx], y, f.values()[jy]);
            auto [lx, hx] = detail::touch_slope_range(f, jx);
            auto [ly, hy] = detail::touch_slope_range(f, jy);
            double st = tol * std::max(1.0, std::abs(g.slope));
            if (g.slope < lx - st || g.slope > hx + st) continue;
            if (g.slope < ly - st || g.slope > hy + st) continue;
            if (!detail::line_dominates_range(f, g, I.first_kink, I.last_kink, vt)) continue;
            if (!detail::line_dominates_range(f, g, J.first_kink, J.last_kink, vt)) continue;
            return TangentLine{g.slope, g.intercept, x, y, ell, ell_prime};
        }
    }
    return std::nullopt;
}

inline std::optional<TangentLine> tangent_between(const PiecewiseLinear& f, std::size_t ell,
                                                  std::size_t ell_prime, double tol = 1e-9) {
    return tangent_between(concave_intervals(f), ell, ell_prime, tol);
}

// Replaces f on [pool_lo, pool_hi] by the affine piece through (z_star, f(z_star)).
// Interior pool endpoints pin the slope (they sit on the same line whenever the
// pool came from the tangent construction); a pool reaching the boundary keeps
// the tangency through the interior endpoint instead of the raw chord, which
// would otherwise break continuity at the interior end.
inline PiecewiseLinear upper_closure_with_pool(const PiecewiseLinear& f, double pool_lo,
                                               double pool_hi, double z_star) {
    double w = f.hi() - f.lo();
    double tol = 1e-12 * std::max(1.0, w);
    if (pool_lo < f.lo() - tol || pool_hi > f.hi() + tol)
        throw DomainError("pool exceeds function domain");
    if (!(pool_lo - tol <= z_star && z_star <= pool_hi + tol))
        throw DomainError("pool atom must lie inside the pool");
    pool_lo = std::clamp(pool_lo, f.lo(), f.hi());
    pool_hi = std::clamp(pool_hi, f.lo(), f.hi());
    z_star = std::clamp(z_star, pool_lo, pool_hi);
    if (pool_hi - pool_lo <= 1e-9 * std::max(1.0, w)) return f;

    bool lo_interior = pool_lo > f.lo() + tol;
    bool hi_interior = pool_hi < f.hi() - tol;
    double fz = f.eval(z_star);
    Line g;
    if (lo_interior && hi_interior)
        g = chord(f, pool_lo, pool_hi);
    else if (lo_interior && std::abs(z_star - pool_lo) > tol)
        g = Line::through(pool_lo, f.eval(pool_lo), z_star, fz);
    else if (hi_interior && std::abs(z_star - pool_hi) > tol)
        g = Line::through(z_star, fz, pool_hi, f.eval(pool_hi));
    else {
        // pool spans the whole domain: pick the flattest slope through the atom
        // that clears every kink
        double lo_s = -std::numeric_limits<double>::infinity();
        double hi_s = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < f.breakpoints().size(); ++j) {
            double dz = f.breakpoints()[j] - z_star;
            if (std::abs(dz) <= tol) continue;
            double need = (f.values()[j] - fz) / dz;
            if (dz > 0)
                lo_s = std::max(lo_s, need);
            else
                hi_s = std::min(hi_s, need);
        }
        double slope = std::isfinite(lo_s) && std::isfinite(hi_s) ? 0.5 * (lo_s + hi_s)
                       : std::isfinite(lo_s)                      ? lo_s
                       : std::isfinite(hi_s)                      ? hi_s
                                                                  : 0.0;
        g = Line::point_slope(z_star, fz, slope);
    }

    std::vector<double> z, v;
    auto push = [&](double zz, double vv) {
        if (!z.empty() && zz <= z.back() + tol) return;
        z.push_back(zz);
        v.push_back(vv);
    };
    for (std::size_t i = 0; i < f.breakpoints().size() && f.breakpoints()[i] < pool_lo - tol; ++i)
        push(f.breakpoints()[i], f.values()[i]);
    push(pool_lo, lo_interior ? f.eval(pool_lo) : g(pool_lo));
    push(z_star, fz);
    push(pool_hi, hi_interior ? f.eval(pool_hi) : g(pool_hi));
    for (std::size_t i = 0; i < f.breakpoints().size(); ++i)
        if (f.breakpoints()[i] > pool_hi + tol) push(f.breakpoints()[i], f.values()[i]);
    if (z.size() < 2) return f;
    return PiecewiseLinear(std::move(z), std::move(v));
}

namespace detail {

// Maximal [A, B] containing [anchor_lo, anchor_hi] on which g(z) >= f(z) - tol.
inline std::pair<double, double> dominance_interval(const PiecewiseLinear& f, const Line& g,
                                                    double anchor_lo, double anchor_hi,
                                                    double tol = 1e-11) {
    const auto& z = f.breakpoints();
    double A = anchor_lo, B = anchor_hi;
    // extend left
    {
        auto it = std::upper_bound(z.begin(), z.end(), anchor_lo - tol);
        std::size_t j = (it == z.begin()) ? 0 : std::size_t(it - z.begin());
        double cur = anchor_lo;
        bool open = true;
        while (open) {
            double prev = (j == 0) ? f.lo() : z[j - 1];
            if (cur <= f.lo() + tol) break;
            prev = std::min(prev, cur);
            double h_cur = g(cur) - f.eval(cur);
            double h_prev = g(prev) - f.eval(prev);
            if (h_prev >= -tol) {
                A = prev;
                cur = prev;
                if (j == 0) break;
                --j;
            } else {
                // crossing inside (prev, cur)
                double t = h_cur / (h_cur - h_prev);
                A = cur + t * (prev - cur);
                open = false;
            }
        }
        A = std::max(A, f.lo());
    }
    // extend right
    {
        auto it = std::lower_bound(z.begin(), z.end(), anchor_hi + tol);
        std::size_t j = std::size_t(it - z.begin());
        double cur = anchor_hi;
        bool open = true;
        while (open) {
            double next = (j >= z.size()) ? f.hi() : z[j];
            if (cur >= f.hi() - tol) break;
            next = std::max(next, cur);
            double h_cur = g(cur) - f.eval(cur);
            double h_next = g(next) - f.eval(next);
            if (h_next >= -tol) {
                B = next;
                cur = next;
                if (j >= z.size()) break;
                ++j;
            } else {
                double t = h_cur / (h_cur - h_next);
                B = cur + t * (next - cur);
                open = false;
            }
        }
        B = std::min(B, f.hi());
    }
    return {A, B};
}

}  // namespace detail

}  // namespace infodesign
