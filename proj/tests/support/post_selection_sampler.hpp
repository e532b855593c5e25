#pragma once

// Test-only oracle: exact draws from the joint law of standardized summary
// statistics conditional on randomized selection. Independent of the
// library's Rao-Blackwell and Lemma-style closed forms (it never calls
// them); it only relies on the normal kernels, which are verified against
// frozen high-precision values elsewhere.
//
// Model: X = gamma_hat/se_gamma ~ N(a, 1), Y = Gamma_hat/se_Gamma ~ N(b, 1)
// with corr(X, Y) = rho, pseudo-noise Z ~ N(0, eta^2) independent of both,
// selection event |X + Z| > lambda.
//
// Sampling route (no rejection): W = X + Z ~ N(a, s^2), s^2 = 1 + eta^2.
// W | selected is drawn by inverse-CDF truncation to the two tails; then
// (X, Y) | W = w is bivariate normal with
//   E[X|w] = a + k(w - a),  E[Y|w] = b + rho k (w - a),  k = 1/s^2,
//   Cov    = [[1-k, rho(1-k)], [rho(1-k), 1 - rho^2 k]],
// whose Cholesky factor is [[sqrt(1-k), 0], [rho sqrt(1-k), sqrt(1-rho^2)]].

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "brivw/random.hpp"
#include "brivw/stat_kernels.hpp"

namespace brivw::test_support {

class PostSelectionSampler {
public:
    PostSelectionSampler(double a, double b, double rho, double lambda, double eta)
        : a_(a), b_(b), rho_(rho), lambda_(lambda), eta_(eta) {
        if (!(std::fabs(rho) < 1.0) || !(eta > 0.0) || !(lambda >= 0.0)) {
            throw std::invalid_argument("PostSelectionSampler: bad parameters");
        }
        s_ = std::sqrt(1.0 + eta * eta);
        mass_lo_ = norm_cdf((-lambda - a) / s_);
        mass_hi_ = norm_sf((lambda - a) / s_);
        if (!(mass_lo_ + mass_hi_ > 0.0)) {
            throw std::invalid_argument("PostSelectionSampler: selection mass underflows");
        }
        k_ = 1.0 / (s_ * s_);
        l11_ = std::sqrt(1.0 - k_);
        l21_ = rho * l11_;
        l22_ = std::sqrt(1.0 - rho * rho);
    }

    struct Draw {
        double x;  // standardized exposure estimate
        double y;  // standardized outcome estimate
        double z;  // pseudo-noise that went into the selection statistic
    };

    Draw draw(RandomStream& rng) const {
        double u = rng.next_uniform() * (mass_lo_ + mass_hi_);
        double v;  // standardized W
        if (u < mass_lo_) {
            v = norm_quantile(u);
        } else {
            // upper tail: solve Q(v) = remaining mass, avoiding 1-q
            double q = (mass_lo_ + mass_hi_) - u;
            v = -norm_quantile(q);
        }
        double w = a_ + s_ * v;
        double d = w - a_;
        double z1 = rng.next_normal();
        double z2 = rng.next_normal();
        double x = a_ + k_ * d + l11_ * z1;
        double y = b_ + rho_ * k_ * d + l21_ * z1 + l22_ * z2;
        return {x, y, w - x};
    }

    double selection_prob() const { return mass_lo_ + mass_hi_; }

private:
    double a_, b_, rho_, lambda_, eta_;
    double s_, mass_lo_, mass_hi_, k_, l11_, l21_, l22_;
};

/// Tabulated CDF of a smooth density over [lo, hi], built with one
/// cumulative trapezoid sweep on a uniform grid; eval() interpolates
/// linearly (second-order accurate, far below the KS tolerances used in
/// the tests).
class TabulatedCdf {
public:
    template <typename Density>
    TabulatedCdf(const Density& f, double lo, double hi, std::size_t intervals = 24000)
        : lo_(lo), step_((hi - lo) / static_cast<double>(intervals)) {
        cum_.resize(intervals + 1);
        cum_[0] = 0.0;
        double prev = f(lo);
        for (std::size_t k = 1; k < cum_.size(); ++k) {
            double cur = f(lo + static_cast<double>(k) * step_);
            cum_[k] = cum_[k - 1] + 0.5 * (prev + cur) * step_;
            prev = cur;
        }
    }

    double operator()(double x) const {
        if (x <= lo_) return 0.0;
        double pos = (x - lo_) / step_;
        auto k = static_cast<std::size_t>(pos);
        if (k >= cum_.size() - 1) return cum_.back();
        double frac = pos - static_cast<double>(k);
        return cum_[k] + frac * (cum_[k + 1] - cum_[k]);
    }

    double total_mass() const { return cum_.back(); }

private:
    double lo_;
    double step_;
    std::vector<double> cum_;
};

/// Running mean/variance/covariance helper for the Monte Carlo checks.
class MomentAccumulator {
public:
    void add(double x) {
        ++n_;
        sum_ += x;
        sum2_ += x * x;
    }
    double n() const { return static_cast<double>(n_); }
    double mean() const { return sum_ / n(); }
    double variance() const {
        double m = mean();
        return sum2_ / n() - m * m;
    }
    double se_of_mean() const { return std::sqrt(variance() / n()); }

private:
    long long n_ = 0;
    double sum_ = 0.0, sum2_ = 0.0;
};

}  // namespace brivw::test_support
