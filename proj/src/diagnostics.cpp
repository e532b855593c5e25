#include "brivw/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "brivw/selection.hpp"
#include "brivw/stat_kernels.hpp"

namespace brivw {

namespace {

constexpr double kMinSelectionProb = 1e-300;
constexpr double kSupportHalfWidth = 12.0;

double selection_prob(const Lemma1Params& p) {
    SelectionConfig cfg;
    cfg.lambda = p.lambda;
    cfg.eta = p.eta;
    double pr = prob_select(p.gamma_over_sigma, cfg);
    if (pr < kMinSelectionProb) {
        throw std::domain_error(
            "conditional distribution is ill-defined: selection probability underflows");
    }
    return pr;
}

}  // namespace

void Lemma1Params::validate() const {
    if (!(std::fabs(rho) < 1.0)) {
        throw std::invalid_argument("Lemma1Params: |rho| must be < 1");
    }
    if (!(lambda >= 0.0)) throw std::invalid_argument("Lemma1Params: lambda must be >= 0");
    if (!(eta > 0.0)) throw std::invalid_argument("Lemma1Params: eta must be > 0");
}

double conditional_density(double x, const Lemma1Params& p) {
    p.validate();
    double pr = selection_prob(p);
    double shift = -p.gamma_over_sigma + p.rho * p.Gamma_over_sigma - p.rho * x;
    double s = std::sqrt(1.0 - p.rho * p.rho + p.eta * p.eta);
    double bracket = norm_cdf((-p.lambda + shift) / s) + norm_sf((p.lambda + shift) / s);
    return norm_pdf(x - p.Gamma_over_sigma) * bracket / pr;
}

double conditional_mean(const Lemma1Params& p) {
    p.validate();
    double pr = selection_prob(p);
    double s = std::sqrt(1.0 + p.eta * p.eta);
    double bias = p.rho / (pr * s) *
                  (norm_pdf((p.lambda - p.gamma_over_sigma) / s) -
                   norm_pdf((-p.lambda - p.gamma_over_sigma) / s));
    return p.Gamma_over_sigma + bias;
}

double conditional_cdf(double x, const Lemma1Params& p) {
    p.validate();
    double lo = p.Gamma_over_sigma - kSupportHalfWidth;
    if (x <= lo) return 0.0;
    double hi = std::min(x, p.Gamma_over_sigma + kSupportHalfWidth);
    double mass = integrate([&](double t) { return conditional_density(t, p); }, lo, hi);
    return std::min(mass, 1.0);
}

double integrate(const std::function<double(double)>& f, double lo, double hi) {
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 12, 1e-10);
}

}  // namespace brivw
