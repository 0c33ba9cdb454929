#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "infodesign/errors.hpp"

namespace infodesign {

enum class PriorKind { Uniform, TruncatedGaussian, MixtureOfUniforms, PiecewiseLinearCdf };

inline std::string to_string(PriorKind k) {
    switch (k) {
        case PriorKind::Uniform: return "uniform";
        case PriorKind::TruncatedGaussian: return "truncated-gaussian";
        case PriorKind::MixtureOfUniforms: return "finite-mixture-of-uniforms";
        case PriorKind::PiecewiseLinearCdf: return "piecewise-linear-cdf";
    }
    return "?";
}

namespace detail {

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double std_normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

}  // namespace detail

// One-dimensional state distribution on a closed interval.  All moment
// queries are answered in closed form so that downstream tolerances of
// 1e-10 and better are attainable.
class Prior {
public:
    struct UniformComponent {
        double weight, lo, hi;
    };

    static Prior uniform(double lo, double hi) {
        require(hi > lo, "uniform prior needs hi > lo");
        Prior p;
        p.kind_ = PriorKind::Uniform;
        p.set_step_density({lo, hi}, {1.0 / (hi - lo)});
        return p;
    }

    static Prior truncated_gaussian(double mu, double sigma, double lo, double hi) {
        require(hi > lo, "truncated gaussian needs hi > lo");
        require(sigma > 0, "truncated gaussian needs sigma > 0");
        Prior p;
        p.kind_ = PriorKind::TruncatedGaussian;
        p.mu_ = mu;
        p.sigma_ = sigma;
        p.lo_ = lo;
        p.hi_ = hi;
        p.alpha_ = (lo - mu) / sigma;
        p.beta_ = (hi - mu) / sigma;
        p.z_mass_ = detail::std_normal_cdf(p.beta_) - detail::std_normal_cdf(p.alpha_);
        require(p.z_mass_ > 1e-14, "truncation window carries no gaussian mass");
        return p;
    }

    static Prior mixture_of_uniforms(const std::vector<UniformComponent>& comps) {
        require(!comps.empty(), "mixture needs at least one component");
        double wsum = 0;
        std::vector<double> breaks;
        for (const auto& c : comps) {
            require(c.hi > c.lo, "mixture component needs hi > lo");
            require(c.weight > 0, "mixture component weight must be positive");
            wsum += c.weight;
            breaks.push_back(c.lo);
            breaks.push_back(c.hi);
        }
        require(std::abs(wsum - 1.0) <= 1e-9, "mixture weights must sum to 1");
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end(),
                                 [](double a, double b) { return std::abs(a - b) <= 1e-15; }),
                     breaks.end());
        std::vector<double> dens(breaks.size() - 1, 0.0);
        for (const auto& c : comps) {
            for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
                double mid = 0.5 * (breaks[k] + breaks[k + 1]);
                if (mid > c.lo && mid < c.hi) dens[k] += c.weight / (c.hi - c.lo);
            }
        }
        Prior p;
        p.kind_ = PriorKind::MixtureOfUniforms;
        p.components_ = comps;
        p.set_step_density(breaks, dens);
        return p;
    }

    // Knots (z_i, F_i) with F_0 = 0, F_last = 1; the CDF linearly interpolates,
    // i.e. the density is piecewise constant.
    static Prior piecewise_linear_cdf(const std::vector<std::pair<double, double>>& knots) {
        require(knots.size() >= 2, "piecewise-linear CDF needs at least two knots");
        require(std::abs(knots.front().second) <= 1e-12, "first knot must have F=0");
        require(std::abs(knots.back().second - 1.0) <= 1e-12, "last knot must have F=1");
        std::vector<double> breaks, dens;
        for (std::size_t i = 0; i < knots.size(); ++i) {
            breaks.push_back(knots[i].first);
            if (i > 0) {
                double dz = knots[i].first - knots[i - 1].first;
                double dF = knots[i].second - knots[i - 1].second;
                require(dz > 0, "CDF knots must be strictly increasing in z");
                require(dF >= -1e-12, "CDF must be nondecreasing");
                dens.push_back(std::max(0.0, dF) / dz);
            }
        }
        Prior p;
        p.kind_ = PriorKind::PiecewiseLinearCdf;
        p.knots_ = knots;
        p.set_step_density(breaks, dens);
        return p;
    }

    PriorKind kind() const { return kind_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return hi_ - lo_; }

    double cdf(double z) const {
        if (z <= lo_) return 0.0;
        if (z >= hi_) return 1.0;
        if (kind_ == PriorKind::TruncatedGaussian) {
            double zeta = (z - mu_) / sigma_;
            return (detail::std_normal_cdf(zeta) - detail::std_normal_cdf(alpha_)) / z_mass_;
        }
        std::size_t k = cell(z);
        return cum_[k] + dens_[k] * (z - breaks_[k]);
    }

    double pdf(double z) const {
        if (z < lo_ || z > hi_) return 0.0;
        if (kind_ == PriorKind::TruncatedGaussian)
            return detail::std_normal_pdf((z - mu_) / sigma_) / (sigma_ * z_mass_);
        std::size_t k = cell(std::min(z, hi_ - 1e-300));
        return dens_[k];
    }

    // Generalized inverse F^{-1}(u) = inf{z : F(z) >= u}.
    double quantile(double u) const {
        u = std::clamp(u, 0.0, 1.0);
        if (u <= 0.0) return lo_;
        if (u >= 1.0) return hi_;
        if (kind_ == PriorKind::TruncatedGaussian) return tgauss_quantile(u);
        // inf{z : F(z) >= u}: an exact hit lands on the left edge of any flat
        auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
        std::size_t j = std::size_t(it - cum_.begin());
        if (j == 0 || *it == u) return breaks_[j];
        std::size_t k = j - 1;  // cum_[k] < u < cum_[k+1], so dens_[k] > 0
        return std::min(hi_, breaks_[k] + (u - cum_[k]) / dens_[k]);
    }

    double mass(double a, double b) const { return cdf(b) - cdf(a); }

    // ∫_a^b z dF(z)
    double partial_mean(double a, double b) const {
        a = std::clamp(a, lo_, hi_);
        b = std::clamp(b, lo_, hi_);
        if (b <= a) return 0.0;
        if (kind_ == PriorKind::TruncatedGaussian) {
            double za = (a - mu_) / sigma_, zb = (b - mu_) / sigma_;
            double m = (detail::std_normal_cdf(zb) - detail::std_normal_cdf(za)) / z_mass_;
            return mu_ * m + sigma_ * (detail::std_normal_pdf(za) - detail::std_normal_pdf(zb)) / z_mass_;
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < dens_.size(); ++k) {
            double u = std::max(a, breaks_[k]), v = std::min(b, breaks_[k + 1]);
            if (v > u) acc += dens_[k] * 0.5 * (v * v - u * u);
        }
        return acc;
    }

    // ∫_a^b F(z) dz
    double cdf_integral(double a, double b) const {
        a = std::clamp(a, lo_, hi_);
        b = std::clamp(b, lo_, hi_);
        if (b <= a) return 0.0;
        if (kind_ == PriorKind::TruncatedGaussian) {
            // ∫ Phi((z-mu)/sigma) dz = sigma * (x Phi(x) + phi(x))
            auto anti = [&](double z) {
                double x = (z - mu_) / sigma_;
                return sigma_ * (x * detail::std_normal_cdf(x) + detail::std_normal_pdf(x));
            };
            double base = detail::std_normal_cdf(alpha_);
            return (anti(b) - anti(a) - base * (b - a)) / z_mass_;
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < dens_.size(); ++k) {
            double u = std::max(a, breaks_[k]), v = std::min(b, breaks_[k + 1]);
            if (v > u) {
                double Fu = cum_[k] + dens_[k] * (u - breaks_[k]);
                acc += Fu * (v - u) + 0.5 * dens_[k] * (v - u) * (v - u);
            }
        }
        return acc;
    }

    double mean() const { return partial_mean(lo_, hi_); }

    // E[S | a <= S <= b]; degenerate-mass windows fall back to the midpoint.
    double cond_mean(double a, double b) const {
        double m = mass(a, b);
        if (m <= 1e-300) return 0.5 * (std::max(a, lo_) + std::min(b, hi_));
        return partial_mean(a, b) / m;
    }

    // Accessors used by serialization.
    double param_mu() const { return mu_; }
    double param_sigma() const { return sigma_; }
    const std::vector<UniformComponent>& components() const { return components_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

private:
    static void require(bool ok, const char* msg) {
        if (!ok) throw ConfigError(msg);
    }

    void set_step_density(std::vector<double> breaks, std::vector<double> dens) {
        breaks_ = std::move(breaks);
        dens_ = std::move(dens);
        lo_ = breaks_.front();
        hi_ = breaks_.back();
        cum_.assign(breaks_.size(), 0.0);
        for (std::size_t k = 0; k < dens_.size(); ++k)
            cum_[k + 1] = cum_[k] + dens_[k] * (breaks_[k + 1] - breaks_[k]);
        double total = cum_.back();
        require(std::abs(total - 1.0) <= 1e-9, "density must integrate to 1");
        // renormalize the residual so cdf(hi) == 1 exactly
        for (auto& d : dens_) d /= total;
        for (auto& c : cum_) c /= total;
        cum_.back() = 1.0;
    }

    std::size_t cell(double z) const {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), z);
        std::size_t k = (it == breaks_.begin()) ? 0 : std::size_t(it - breaks_.begin()) - 1;
        return std::min(k, dens_.size() - 1);
    }

    double tgauss_quantile(double u) const {
        double target = detail::std_normal_cdf(alpha_) + u * z_mass_;
        double a = alpha_, b = beta_;
        double x = 0.5 * (a + b);
        for (int it = 0; it < 200; ++it) {
            double f = detail::std_normal_cdf(x) - target;
            if (f > 0)
                b = x;
            else
                a = x;
            double step = f / std::max(detail::std_normal_pdf(x), 1e-300);
            double xn = x - step;
            if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
            if (std::abs(xn - x) <= 1e-15 * std::max(1.0, std::abs(x))) {
                x = xn;
                break;
            }
            x = xn;
        }
        return std::clamp(mu_ + sigma_ * x, lo_, hi_);
    }

    PriorKind kind_ = PriorKind::Uniform;
    double lo_ = 0, hi_ = 1;

    // step-density backend (uniform / mixture / piecewise-linear CDF)
    std::vector<double> breaks_, dens_, cum_;
    std::vector<UniformComponent> components_;
    std::vector<std::pair<double, double>> knots_;

    // truncated gaussian backend
    double mu_ = 0, sigma_ = 1, alpha_ = 0, beta_ = 0, z_mass_ = 1;
};

namespace detail {

// Adaptive Simpson quadrature.  Only used as an independent cross-check and
// for revenue integrals of solver-backed oracles.
template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth, int min_depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    // min_depth guards against coincidental agreement across density jumps
    if (depth <= 0 || (min_depth <= 0 && std::abs(left + right - whole) <= 15 * tol))
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1, min_depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1, min_depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-10, int depth = 42,
                        int min_depth = 8) {
    if (b <= a) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth, min_depth);
}

}  // namespace detail

}  // namespace infodesign
