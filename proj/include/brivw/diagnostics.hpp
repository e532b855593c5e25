#pragma once

#include <functional>

namespace brivw {

/// Standardized inputs for the post-selection distribution of the outcome
/// association: everything is expressed on the Gamma_hat/se_Gamma and
/// gamma_hat/se_gamma scales, so se's never enter the closed forms.
struct Lemma1Params {
    double gamma_over_sigma = 0.0;  // true exposure t-score
    double Gamma_over_sigma = 0.0;  // true outcome t-score
    double rho = 0.0;
    double lambda = 0.0;
    double eta = 0.5;

    /// Throws std::invalid_argument on |rho| >= 1, lambda < 0 or eta <= 0.
    void validate() const;
};

/// Density of Gamma_hat/se_Gamma conditional on the SNP being selected.
/// Throws a conditioning error (std::domain_error) when the selection
/// probability is below 1e-300.
double conditional_density(double x, const Lemma1Params& p);

/// Mean of Gamma_hat/se_Gamma conditional on selection (standardized
/// units; multiply by se_Gamma for the Gamma_hat scale).
double conditional_mean(const Lemma1Params& p);

/// Post-selection CDF of Gamma_hat/se_Gamma, integrated numerically from
/// Gamma_over_sigma - 12 (the density is numerically zero below that).
double conditional_cdf(double x, const Lemma1Params& p);

/// Adaptive Gauss-Kronrod integral with a 1e-10 relative target, shared by
/// the diagnostics and their tests.
double integrate(const std::function<double(double)>& f, double lo, double hi);

}  // namespace brivw
