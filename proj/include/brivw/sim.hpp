#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "brivw/estimators.hpp"
#include "brivw/random.hpp"
#include "brivw/selection.hpp"
#include "brivw/structure.hpp"

namespace brivw {

enum class EffectDist { kNormal, kUniform };

std::string effect_dist_name(EffectDist d);
EffectDist effect_dist_from_name(const std::string& name);

/// Data-generating parameters of the four-component effect mixture
/// (valid IVs / balanced pleiotropy / outcome-only / null) plus the
/// bivariate summary-statistic model.
struct MixtureConfig {
    double beta = 0.0;
    std::size_t p = 200000;
    double pi_x = 0.02;
    double pi_y = 0.01;
    double omega = 0.0;
    double eps_x2 = 5e-5;
    double tau2 = 5e-5;
    std::size_t n_x = 100000;
    std::size_t n_y = 100000;
    double rho = 0.0;
    double c1 = 1.0;
    double c2 = 1.0;
    EffectDist effect_dist = EffectDist::kNormal;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument on an infeasible configuration
    /// (probabilities out of range, pi_x + pi_y > 1, heritability
    /// p*pi_x*eps_x2 outside (0,1), non-positive sizes).
    void validate() const;

    StructureParams structure() const;
};

struct EffectTable {
    std::vector<double> gamma;
    std::vector<double> alpha;
    std::vector<double> Gamma;  // beta*gamma + alpha
};

/// Draws true per-SNP effects. Each SNP uses the substream keyed by its
/// index, so the table is reproducible under any evaluation order.
EffectTable generate_effects(const MixtureConfig& cfg, const RandomStream& stream);

/// Draws GWAS summary statistics around the true effects under the
/// bivariate error model: noise SDs c1/sqrt(n_x), c2/sqrt(n_y) with
/// correlation rho; reported (raw) SEs are 1/sqrt(n). Pairs come back
/// unadjusted.
std::vector<SnpPair> generate_summary(const EffectTable& effects, const MixtureConfig& cfg,
                                      const RandomStream& stream);

/// Five-metric Monte Carlo summary for one method.
struct McReport {
    Method method = Method::kIvw;
    double bias = 0.0;
    double bias_proportion = 0.0;  // NaN when beta == 0
    double mse = 0.0;
    double coverage = 0.0;
    double rejection_rate = 0.0;  // type I error when beta == 0, power otherwise
    double mean_selected = 0.0;
    double mean_se = 0.0;  // mean reported sqrt(V_hat) over successful replicates
    std::size_t n_replicates = 0;  // successful replicates
    std::size_t n_failures = 0;
    double mc_se_bias = 0.0;
};

struct McResult {
    std::vector<McReport> by_method;
    /// Mean fraction of significant SNPs whose p-value sits between 5e-8
    /// and 5e-10 (the "IVs near the cutoff" display quantity).
    double iv_proportion = 0.0;
};

/// Runs `replicates` full generate/adjust/select/estimate cycles and
/// aggregates the metrics. Per-replicate substreams are keyed by
/// (cfg.seed, replicate) and (sel.seed, replicate), so the output is
/// bit-identical for any worker count. Per-replicate estimation failures
/// are counted and excluded from the metric denominators.
McResult run_mc(const MixtureConfig& cfg, const SelectionConfig& sel,
                const std::vector<Method>& methods, std::size_t replicates,
                double alpha = 0.05, int workers = 0);

struct SweepCell {
    MixtureConfig mix;
    SelectionConfig sel;
};

struct SweepOptions {
    std::vector<Method> methods;
    std::size_t replicates = 200;
    double alpha = 0.05;
    int workers = 0;
};

/// Runs run_mc per cell and writes a long-format CSV (one row per cell x
/// method x metric). Infeasible or failed cells are emitted as flagged
/// rows rather than aborting the sweep.
void sweep(const std::vector<SweepCell>& grid, const SweepOptions& opts, std::ostream& csv);

/// Number of worker threads a sim run will actually use.
int resolve_workers(int requested);

}  // namespace brivw
