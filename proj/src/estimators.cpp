#include "brivw/estimators.hpp"

#include <cmath>

#include "brivw/numeric.hpp"
#include "brivw/stat_kernels.hpp"

namespace brivw {

std::string method_name(Method m) {
    switch (m) {
        case Method::kIvw: return "IVW";
        case Method::kDivw: return "dIVW";
        case Method::kRivw: return "RIVW";
        case Method::kBrivw: return "BRIVW";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "IVW" || name == "ivw") return Method::kIvw;
    if (name == "dIVW" || name == "divw") return Method::kDivw;
    if (name == "RIVW" || name == "rivw") return Method::kRivw;
    if (name == "BRIVW" || name == "brivw") return Method::kBrivw;
    throw std::invalid_argument("unknown method '" + name + "'");
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0,1)");
    }
}

void finish_inference(EstimateResult& res, double alpha) {
    double se = std::sqrt(res.var_hat);
    double z = norm_quantile(1.0 - alpha / 2.0);
    res.ci_low = res.beta_hat - z * se;
    res.ci_high = res.beta_hat + z * se;
    if (se > 0.0) {
        res.p_value = 2.0 * norm_sf(std::fabs(res.beta_hat) / se);
    } else {
        res.p_value = (res.beta_hat == 0.0) ? 1.0 : 0.0;
    }
}

// Shared ratio-estimator core: beta = sum(prod/sG^2)/sum(den/sG^2) with the
// residual variance of the regression interpretation. prod and den are the
// per-SNP numerator and denominator terms before the 1/sG^2 weight.
struct RatioTerms {
    std::vector<double> prod;
    std::vector<double> den;
    std::vector<double> se_Gamma;
    std::vector<double> strength;  // den / se_gamma^2, for kappa_hat
};

double weighted_sum(const std::vector<double>& terms, const std::vector<double>& se_Gamma) {
    CompensatedSum s;
    for (std::size_t j = 0; j < terms.size(); ++j) {
        double w = se_Gamma[j] * se_Gamma[j];
        s.add(terms[j] / w);
    }
    return s.value();
}

double residual_variance(const RatioTerms& t, double beta_hat, double denominator) {
    CompensatedSum num;
    for (std::size_t j = 0; j < t.prod.size(); ++j) {
        double resid = t.prod[j] - beta_hat * t.den[j];
        double w2 = t.se_Gamma[j] * t.se_Gamma[j];
        num.add((resid * resid) / (w2 * w2));
    }
    return num.value() / (denominator * denominator);
}

double kappa_plugin(const RatioTerms& t) {
    if (t.strength.empty()) return 0.0;
    CompensatedSum s;
    for (double v : t.strength) s.add(v);
    return s.value() / static_cast<double>(t.strength.size());
}

EstimateResult ratio_estimate(Method method, const RatioTerms& t, double alpha,
                              const char* weak_message) {
    check_alpha(alpha);
    if (t.prod.empty()) {
        throw EstimationError(method_name(method) + ": no SNPs to estimate from");
    }

    double den = weighted_sum(t.den, t.se_Gamma);
    EstimateResult res;
    res.method = method;
    res.n_selected = t.prod.size();
    res.kappa_hat = kappa_plugin(t);
    if (!(den > 0.0)) {
        throw EstimationError(method_name(method) + ": " + weak_message +
                              " (denominator " + std::to_string(den) + ", kappa_hat " +
                              std::to_string(res.kappa_hat) + ")");
    }
    res.beta_hat = weighted_sum(t.prod, t.se_Gamma) / den;
    if (t.prod.size() == 1) {
        throw DegenerateInferenceError(
            method_name(method) + ": only one SNP selected; the residual variance is degenerate",
            res.beta_hat);
    }
    res.var_hat = residual_variance(t, res.beta_hat, den);
    finish_inference(res, alpha);
    return res;
}

void require_adjusted(const std::vector<SnpPair>& pairs, const char* who) {
    for (const SnpPair& p : pairs) {
        if (!p.adjusted) {
            throw std::invalid_argument(std::string(who) + ": pair '" + p.id +
                                        "' is not adjusted");
        }
    }
}

}  // namespace

EstimateResult estimate_ivw(const std::vector<SnpPair>& pairs, double alpha) {
    check_alpha(alpha);
    require_adjusted(pairs, "ivw");
    if (pairs.empty()) throw EstimationError("IVW: no SNPs to estimate from");

    CompensatedSum num, den, strength;
    for (const SnpPair& p : pairs) {
        double w = p.se_Gamma * p.se_Gamma;
        num.add(p.Gamma_hat * p.gamma_hat / w);
        den.add(p.gamma_hat * p.gamma_hat / w);
        double sg2 = p.se_gamma * p.se_gamma;
        strength.add((p.gamma_hat * p.gamma_hat - sg2) / sg2);
    }
    double d = den.value();
    if (!(d > 0.0)) throw EstimationError("IVW: zero denominator");

    EstimateResult res;
    res.method = Method::kIvw;
    res.beta_hat = num.value() / d;
    res.var_hat = 1.0 / d;  // fixed-effect rule
    res.n_selected = pairs.size();
    res.kappa_hat = strength.value() / static_cast<double>(pairs.size());
    finish_inference(res, alpha);
    return res;
}

EstimateResult estimate_divw(const std::vector<SnpPair>& pairs, double alpha) {
    require_adjusted(pairs, "divw");
    RatioTerms t;
    t.prod.reserve(pairs.size());
    t.den.reserve(pairs.size());
    t.se_Gamma.reserve(pairs.size());
    t.strength.reserve(pairs.size());
    for (const SnpPair& p : pairs) {
        double sg2 = p.se_gamma * p.se_gamma;
        t.prod.push_back(p.Gamma_hat * p.gamma_hat);
        t.den.push_back(p.gamma_hat * p.gamma_hat - sg2);
        t.se_Gamma.push_back(p.se_Gamma);
        t.strength.push_back(t.den.back() / sg2);
    }
    return ratio_estimate(Method::kDivw, t, alpha,
                          "instruments too weak after debiasing the denominator");
}

namespace {

RatioTerms terms_from_records(const std::vector<RbRecord>& records) {
    RatioTerms t;
    t.prod.reserve(records.size());
    t.den.reserve(records.size());
    t.se_Gamma.reserve(records.size());
    t.strength.reserve(records.size());
    for (const RbRecord& r : records) {
        t.prod.push_back(r.Gamma_rb * r.gamma_rb - r.cov_rb);
        t.den.push_back(r.gamma_rb * r.gamma_rb - r.var_gamma_rb);
        t.se_Gamma.push_back(r.se_Gamma);
        t.strength.push_back(t.den.back() / (r.se_gamma * r.se_gamma));
    }
    return t;
}

void check_record_count(const std::vector<RbRecord>& records, const SelectionOutcome& sel,
                        const char* who) {
    if (records.size() != sel.n_selected()) {
        throw std::invalid_argument(std::string(who) +
                                    ": record count does not match the selected set");
    }
}

}  // namespace

EstimateResult estimate_rivw(const std::vector<RbRecord>& records, const SelectionOutcome& sel,
                    double alpha) {
    check_record_count(records, sel, "rivw");
    for (const RbRecord& r : records) {
        if (r.cov_rb != 0.0) {
            throw std::invalid_argument(
                "rivw: records carry covariance corrections; build them with rho = 0");
        }
    }
    EstimateResult res = ratio_estimate(Method::kRivw, terms_from_records(records), alpha,
                                        "instruments too weak after selection");
    res.method = Method::kRivw;
    return res;
}

EstimateResult estimate_brivw(const std::vector<RbRecord>& records, const SelectionOutcome& sel,
                     double alpha) {
    check_record_count(records, sel, "brivw");
    return ratio_estimate(Method::kBrivw, terms_from_records(records), alpha,
                          "instruments too weak after selection");
}

double brivw_variance(const std::vector<RbRecord>& records, const SelectionOutcome& sel,
                      double beta_hat) {
    check_record_count(records, sel, "brivw_variance");
    if (records.empty()) throw EstimationError("brivw_variance: no records");
    if (records.size() == 1) {
        throw DegenerateInferenceError(
            "brivw_variance: only one SNP selected; the residual is identically zero", beta_hat);
    }
    RatioTerms t = terms_from_records(records);
    double den = weighted_sum(t.den, t.se_Gamma);
    if (den == 0.0) throw EstimationError("brivw_variance: zero denominator");
    return residual_variance(t, beta_hat, den);
}

double predicted_bias_ivw(std::span<const double> gamma, std::span<const double> se_gamma,
                          std::span<const double> se_Gamma, double rho, double beta) {
    CompensatedSum num, den;
    for (std::size_t j = 0; j < gamma.size(); ++j) {
        double sg = se_gamma[j], sG = se_Gamma[j];
        double w = sG * sG;
        num.add((rho * sg * sG - beta * sg * sg) / w);
        den.add((gamma[j] * gamma[j] + sg * sg) / w);
    }
    return num.value() / den.value();
}

double predicted_bias_divw(std::span<const double> gamma, std::span<const double> se_gamma,
                           std::span<const double> se_Gamma, double rho) {
    CompensatedSum num, den;
    for (std::size_t j = 0; j < gamma.size(); ++j) {
        double sg = se_gamma[j], sG = se_Gamma[j];
        num.add(rho * sg / sG);
        den.add(gamma[j] * gamma[j] / (sG * sG));
    }
    return num.value() / den.value();
}

}  // namespace brivw
