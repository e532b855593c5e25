#pragma once

namespace brivw {

/// Standard normal density.
double norm_pdf(double x);

/// log of the standard normal density.
double log_norm_pdf(double x);

/// Standard normal CDF, accurate in both tails (erfc based).
double norm_cdf(double x);

/// Upper tail probability 1 - Phi(x), computed without cancellation.
double norm_sf(double x);

/// log(1 - Phi(x)); switches to an asymptotic Mills-ratio expansion once
/// the tail mass falls below the double range (x > 36).
double log_norm_sf(double x);

/// Inverse standard normal CDF to full double accuracy (rational
/// approximation plus one Halley refinement). Throws std::domain_error
/// unless 0 < p < 1.
double norm_quantile(double p);

/// Standardized truncation bounds A_+ = -t/eta + lambda/eta and
/// A_- = -t/eta - lambda/eta shared by all Rao-Blackwell corrections.
/// a_plus >= a_minus whenever lambda >= 0 and eta > 0.
struct RatioInputs {
    double a_plus;
    double a_minus;
};

/// Bounds for a SNP with t-score `t_score` under cutoff `lambda` and
/// pseudo-noise scale `eta`. Throws std::domain_error on lambda < 0 or
/// eta <= 0.
RatioInputs make_ratio_inputs(double t_score, double lambda, double eta);

/// (phi(a+) - phi(a-)) / (1 - Phi(a+) + Phi(a-)).
///
/// The denominator is the two-sided acceptance mass; when both tails
/// underflow (a- < -36 < 36 < a+) the whole ratio is evaluated in log
/// space so the result stays finite for |a| up to 40 and beyond.
double rb_ratio(const RatioInputs& r);

/// (a+ phi(a+) - a- phi(a-)) / (1 - Phi(a+) + Phi(a-)), same stability
/// contract as rb_ratio.
double rb_ratio_second(const RatioInputs& r);

}  // namespace brivw
