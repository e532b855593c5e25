#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "brivw/structure.hpp"

namespace brivw {

/// Randomized-selection tuning: cutoff lambda, pseudo-noise scale eta and
/// the seed of the pseudo-SNP noise stream.
struct SelectionConfig {
    double lambda = 0.0;
    double eta = 0.5;
    std::uint64_t seed = 1;

    /// Cutoff from a two-sided p-value threshold, lambda = Phi^-1(1 - p/2).
    static SelectionConfig from_pvalue(double p_threshold, double eta = 0.5,
                                       std::uint64_t seed = 1);

    /// The p-value threshold this lambda corresponds to (round trip of
    /// from_pvalue).
    double pvalue_threshold() const;

    /// Throws std::invalid_argument unless lambda >= 0, eta > 0.
    void validate() const;
};

/// Result of randomized selection. Pseudo-noise and selection statistics
/// are retained for every SNP, selected or not.
struct SelectionOutcome {
    std::vector<std::size_t> selected;  // indices with s_values > 0
    std::vector<double> z_values;       // Z_j ~ N(0, eta^2)
    std::vector<double> s_values;       // |gamma_hat/se_gamma + Z_j| - lambda

    std::size_t n_selected() const { return selected.size(); }
};

/// Randomized instrument selection over adjusted pairs. Z_j is drawn from
/// the substream keyed by (cfg.seed, j), so the outcome is bit-identical
/// across runs and thread counts. Ties S_j = 0 are not selected.
SelectionOutcome select(const std::vector<SnpPair>& pairs, const SelectionConfig& cfg);

/// Closed-form selection probability
/// Pr(S_j > 0) = Phi((-lambda - t)/sqrt(1+eta^2)) + 1 - Phi((lambda - t)/sqrt(1+eta^2))
/// for a SNP with true standardized effect t = gamma/sigma.
double prob_select(double gamma_over_sigma, const SelectionConfig& cfg);

}  // namespace brivw
