#include "brivw/rao_blackwell.hpp"

#include <stdexcept>

#include "brivw/stat_kernels.hpp"

namespace brivw {

namespace {

RatioInputs bounds_for(const SnpPair& pair, const SelectionConfig& cfg) {
    return make_ratio_inputs(pair.gamma_hat / pair.se_gamma, cfg.lambda, cfg.eta);
}

double correction_bracket(const RatioInputs& r, double eta) {
    double ratio = rb_ratio(r);
    double inv_eta2 = 1.0 / (eta * eta);
    return 1.0 - inv_eta2 * rb_ratio_second(r) + inv_eta2 * ratio * ratio;
}

}  // namespace

double gamma_rb(const SnpPair& pair, const SelectionConfig& cfg) {
    cfg.validate();
    return pair.gamma_hat - (pair.se_gamma / cfg.eta) * rb_ratio(bounds_for(pair, cfg));
}

double Gamma_rb(const SnpPair& pair, const SelectionConfig& cfg, double rho) {
    cfg.validate();
    if (rho == 0.0) return pair.Gamma_hat;
    return pair.Gamma_hat - (rho * pair.se_Gamma / cfg.eta) * rb_ratio(bounds_for(pair, cfg));
}

double var_gamma_rb(const SnpPair& pair, const SelectionConfig& cfg) {
    cfg.validate();
    return pair.se_gamma * pair.se_gamma * correction_bracket(bounds_for(pair, cfg), cfg.eta);
}

double cov_rb(const SnpPair& pair, const SelectionConfig& cfg, double rho) {
    cfg.validate();
    if (rho == 0.0) return 0.0;
    return rho * pair.se_gamma * pair.se_Gamma *
           correction_bracket(bounds_for(pair, cfg), cfg.eta);
}

std::vector<RbRecord> build_rb_records(const std::vector<SnpPair>& pairs,
                                       const SelectionOutcome& sel,
                                       const SelectionConfig& cfg, double rho) {
    cfg.validate();
    if (sel.s_values.size() != pairs.size()) {
        throw std::invalid_argument("build_rb_records: selection outcome does not match pairs");
    }

    std::vector<RbRecord> records;
    records.reserve(sel.selected.size());
    for (std::size_t j : sel.selected) {
        const SnpPair& p = pairs[j];
        RatioInputs r = bounds_for(p, cfg);
        double ratio = rb_ratio(r);
        double inv_eta2 = 1.0 / (cfg.eta * cfg.eta);
        double bracket = 1.0 - inv_eta2 * rb_ratio_second(r) + inv_eta2 * ratio * ratio;

        RbRecord rec;
        rec.id = p.id;
        rec.a_plus = r.a_plus;
        rec.a_minus = r.a_minus;
        rec.gamma_rb = p.gamma_hat - (p.se_gamma / cfg.eta) * ratio;
        rec.Gamma_rb = (rho == 0.0)
                           ? p.Gamma_hat
                           : p.Gamma_hat - (rho * p.se_Gamma / cfg.eta) * ratio;
        rec.var_gamma_rb = p.se_gamma * p.se_gamma * bracket;
        rec.cov_rb = (rho == 0.0) ? 0.0 : rho * p.se_gamma * p.se_Gamma * bracket;
        rec.se_gamma = p.se_gamma;
        rec.se_Gamma = p.se_Gamma;
        records.push_back(std::move(rec));
    }
    return records;
}

namespace diag {

double Gamma_ini(const SnpPair& pair, double z, const SelectionConfig& cfg, double rho) {
    cfg.validate();
    return pair.Gamma_hat - (rho * pair.se_Gamma / (cfg.eta * cfg.eta)) * z;
}

}  // namespace diag

}  // namespace brivw
