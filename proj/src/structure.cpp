#include "brivw/structure.hpp"

#include <cmath>
#include <stdexcept>

namespace brivw {

double StructureParams::rho() const {
    return c12 / std::sqrt(c1 * c2);
}

void StructureParams::validate() const {
    if (!(c1 > 0.0) || !std::isfinite(c1) || !(c2 > 0.0) || !std::isfinite(c2)) {
        throw std::invalid_argument("StructureParams: c1 and c2 must be positive and finite");
    }
    if (!std::isfinite(c12)) {
        throw std::invalid_argument("StructureParams: c12 must be finite");
    }
    if (!(std::fabs(rho()) < 1.0)) {
        throw std::invalid_argument("StructureParams: |c12/sqrt(c1*c2)| must be < 1");
    }
}

AdjustResult adjust(const std::vector<SnpPair>& pairs, const StructureParams& params,
                    InflationScale scale) {
    params.validate();

    double f1 = params.c1;
    double f2 = params.c2;
    if (scale == InflationScale::kVariance) {
        f1 = std::sqrt(f1);
        f2 = std::sqrt(f2);
    }

    AdjustResult out;
    out.pairs.reserve(pairs.size());
    for (const SnpPair& p : pairs) {
        if (p.adjusted) {
            throw std::invalid_argument("adjust: record '" + p.id + "' is already adjusted");
        }
        if (!(p.se_gamma_raw > 0.0) || !std::isfinite(p.se_gamma_raw)) {
            out.rejected.push_back({p.id, "non-positive exposure SE"});
            continue;
        }
        if (!(p.se_Gamma_raw > 0.0) || !std::isfinite(p.se_Gamma_raw)) {
            out.rejected.push_back({p.id, "non-positive outcome SE"});
            continue;
        }
        SnpPair q = p;
        q.se_gamma = f1 * p.se_gamma_raw;
        q.se_Gamma = f2 * p.se_Gamma_raw;
        q.adjusted = true;
        out.pairs.push_back(std::move(q));
    }
    return out;
}

}  // namespace brivw
