#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace brivw {

/// How LDSC intercepts map onto reported standard errors. `kSd` treats
/// c1/c2 as SD multipliers (se = c * se_raw); `kVariance` treats them as
/// variance multipliers (se = sqrt(c) * se_raw).
enum class InflationScale { kSd, kVariance };

/// LDSC-derived sample-structure parameters. c1/c2 inflate the exposure
/// and outcome standard errors; c12 is the cross-trait intercept. The
/// induced error correlation rho = c12/sqrt(c1*c2) is always recomputed
/// from the stored intercepts.
struct StructureParams {
    double c1 = 1.0;
    double c2 = 1.0;
    double c12 = 0.0;

    double rho() const;

    /// Throws std::invalid_argument unless c1,c2 > 0 and |rho| < 1.
    void validate() const;
};

/// Per-SNP summary association pair. Raw fields come straight from the
/// GWAS files; se_gamma/se_Gamma are populated by adjust().
struct SnpPair {
    std::string id;
    std::string chrom;          // optional, used by pruning
    std::int64_t pos = -1;      // optional, base pairs

    double gamma_hat = 0.0;     // SNP-exposure estimate
    double se_gamma_raw = 0.0;  // reported exposure SE
    double Gamma_hat = 0.0;     // SNP-outcome estimate
    double se_Gamma_raw = 0.0;  // reported outcome SE

    double se_gamma = 0.0;      // structure-adjusted exposure SE
    double se_Gamma = 0.0;      // structure-adjusted outcome SE
    bool adjusted = false;
};

struct AdjustRejection {
    std::string id;
    std::string reason;
};

struct AdjustResult {
    std::vector<SnpPair> pairs;
    std::vector<AdjustRejection> rejected;
};

/// Rescales reported standard errors by the structure parameters.
/// Records with non-positive or non-finite raw SEs are rejected
/// individually; estimates and ordering are untouched. Throws
/// std::invalid_argument on invalid params or if any input is already
/// adjusted (double adjustment is a bug, not a no-op).
AdjustResult adjust(const std::vector<SnpPair>& pairs, const StructureParams& params,
                    InflationScale scale = InflationScale::kSd);

}  // namespace brivw
