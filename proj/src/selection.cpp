#include "brivw/selection.hpp"

#include <cmath>
#include <stdexcept>

#include "brivw/random.hpp"
#include "brivw/stat_kernels.hpp"

namespace brivw {

SelectionConfig SelectionConfig::from_pvalue(double p_threshold, double eta,
                                             std::uint64_t seed) {
    if (!(p_threshold > 0.0) || !(p_threshold < 1.0)) {
        throw std::invalid_argument("SelectionConfig: p-value threshold must be in (0,1)");
    }
    SelectionConfig cfg;
    cfg.lambda = norm_quantile(1.0 - p_threshold / 2.0);
    cfg.eta = eta;
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

double SelectionConfig::pvalue_threshold() const {
    return 2.0 * norm_sf(lambda);
}

void SelectionConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("SelectionConfig: lambda must be >= 0 and finite");
    }
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw std::invalid_argument("SelectionConfig: eta must be > 0 and finite");
    }
}

SelectionOutcome select(const std::vector<SnpPair>& pairs, const SelectionConfig& cfg) {
    cfg.validate();

    SelectionOutcome out;
    out.z_values.resize(pairs.size());
    out.s_values.resize(pairs.size());

    RandomStream root(cfg.seed);
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const SnpPair& p = pairs[j];
        if (!p.adjusted) {
            throw std::invalid_argument("select: pair '" + p.id + "' is not adjusted");
        }
        RandomStream snp_stream = root.substream(j);
        double z = cfg.eta * snp_stream.next_normal();
        double s = std::fabs(p.gamma_hat / p.se_gamma + z) - cfg.lambda;
        out.z_values[j] = z;
        out.s_values[j] = s;
        if (s > 0.0) out.selected.push_back(j);
    }
    return out;
}

double prob_select(double gamma_over_sigma, const SelectionConfig& cfg) {
    cfg.validate();
    double s = std::sqrt(1.0 + cfg.eta * cfg.eta);
    return norm_cdf((-cfg.lambda - gamma_over_sigma) / s) +
           norm_sf((cfg.lambda - gamma_over_sigma) / s);
}

}  // namespace brivw
