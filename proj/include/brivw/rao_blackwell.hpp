#pragma once

#include <string>
#include <vector>

#include "brivw/selection.hpp"
#include "brivw/structure.hpp"

namespace brivw {

/// Post-selection Rao-Blackwellized quantities for one selected SNP.
/// var_gamma_rb and cov_rb are unbiased per-SNP corrections and may be
/// negative; only their aggregates are consistent, so they are never
/// clamped.
struct RbRecord {
    std::string id;
    double a_plus = 0.0;
    double a_minus = 0.0;
    double gamma_rb = 0.0;      // debiased SNP-exposure estimate
    double Gamma_rb = 0.0;      // debiased SNP-outcome estimate
    double var_gamma_rb = 0.0;  // estimated Var(gamma_rb), can be < 0
    double cov_rb = 0.0;        // estimated Cov(gamma_hat, Gamma_rb), can be < 0
    double se_gamma = 0.0;
    double se_Gamma = 0.0;
};

/// Exposure-side winner's curse correction:
/// gamma_rb = gamma_hat - (se_gamma/eta) * rb_ratio(A+, A-).
double gamma_rb(const SnpPair& pair, const SelectionConfig& cfg);

/// Outcome-side correction:
/// Gamma_rb = Gamma_hat - (rho*se_Gamma/eta) * rb_ratio(A+, A-).
/// Reduces to Gamma_hat when rho = 0.
double Gamma_rb(const SnpPair& pair, const SelectionConfig& cfg, double rho);

/// Variance estimator for gamma_rb:
/// se_gamma^2 * [1 - rb_ratio_second/eta^2 + rb_ratio^2/eta^2].
double var_gamma_rb(const SnpPair& pair, const SelectionConfig& cfg);

/// Post-selection covariance estimator, rho*se_gamma*se_Gamma times the
/// same bracket as var_gamma_rb; cov_rb*se_gamma = rho*se_Gamma*var_gamma_rb
/// holds to rounding error by construction.
double cov_rb(const SnpPair& pair, const SelectionConfig& cfg, double rho);

/// All four quantities for every selected SNP in one pass (A+, A- and the
/// two tail ratios are shared).
std::vector<RbRecord> build_rb_records(const std::vector<SnpPair>& pairs,
                                       const SelectionOutcome& sel,
                                       const SelectionConfig& cfg, double rho);

namespace diag {

/// Crude initial outcome estimator Gamma_hat - (rho*se_Gamma/eta^2) * z,
/// independent of the selection statistic by construction. Exposed for
/// property tests only; it is not part of the estimation pipeline.
double Gamma_ini(const SnpPair& pair, double z, const SelectionConfig& cfg, double rho);

}  // namespace diag

}  // namespace brivw
