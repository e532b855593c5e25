#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "brivw/rao_blackwell.hpp"
#include "brivw/selection.hpp"
#include "brivw/structure.hpp"

namespace brivw {

enum class Method { kIvw, kDivw, kRivw, kBrivw };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// Raised when a causal estimate cannot be formed (non-positive
/// denominator, empty selection, degenerate inference).
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when the point estimate exists but its residual variance is
/// identically zero (exactly one selected SNP). Carries the point
/// estimate so callers can still report it.
class DegenerateInferenceError : public EstimationError {
public:
    DegenerateInferenceError(const std::string& what, double beta_hat)
        : EstimationError(what), beta_hat_(beta_hat) {}
    double beta_hat() const { return beta_hat_; }

private:
    double beta_hat_;
};

struct EstimateResult {
    Method method = Method::kIvw;
    double beta_hat = 0.0;
    double var_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_value = 1.0;
    std::size_t n_selected = 0;
    double kappa_hat = 0.0;  // plug-in post-selection instrument strength
};

/// Classical IVW on an (already selected) set of adjusted pairs, with the
/// fixed-effect variance 1/sum(gamma_hat^2/se_Gamma^2).
EstimateResult estimate_ivw(const std::vector<SnpPair>& pairs, double alpha = 0.05);

/// Debiased IVW: denominator sum((gamma_hat^2 - se_gamma^2)/se_Gamma^2).
/// Inference reuses the residual-based variance with the Rao-Blackwell
/// corrections absent.
EstimateResult estimate_divw(const std::vector<SnpPair>& pairs, double alpha = 0.05);

/// RIVW over records built with rho = 0 (throws if any record carries a
/// covariance correction).
EstimateResult estimate_rivw(const std::vector<RbRecord>& records, const SelectionOutcome& sel,
                    double alpha = 0.05);

/// BRIVW point estimate, residual variance, CI and p-value.
EstimateResult estimate_brivw(const std::vector<RbRecord>& records, const SelectionOutcome& sel,
                     double alpha = 0.05);

/// Residual-based variance estimator for a given beta_hat. Throws a
/// degenerate-inference EstimationError when only one SNP is selected
/// (the residual is identically zero there).
double brivw_variance(const std::vector<RbRecord>& records, const SelectionOutcome& sel,
                      double beta_hat);

/// Leading-order bias of IVW under sample structure, evaluated at the true
/// per-SNP effects (simulation use):
/// sum(rho*sg*sG - beta*sg^2)/sG^2 over sum(gamma^2 + sg^2)/sG^2.
double predicted_bias_ivw(std::span<const double> gamma, std::span<const double> se_gamma,
                          std::span<const double> se_Gamma, double rho, double beta);

/// Leading-order bias of dIVW under sample structure:
/// sum(rho*sg*sG/sG^2) over sum(gamma^2/sG^2).
double predicted_bias_divw(std::span<const double> gamma, std::span<const double> se_gamma,
                           std::span<const double> se_Gamma, double rho);

}  // namespace brivw
