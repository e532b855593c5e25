#pragma once

#include <cstdint>
#include <utility>

namespace brivw {

/// Counter-based random stream with keyed substreams.
///
/// Draws are a pure function of (key, counter), so a stream can be
/// reconstructed from its seed path alone and replicate/SNP substreams
/// stay independent of thread scheduling. Streams are value types; give
/// each worker its own substream instead of sharing one.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    /// Child stream addressed by `index`; derivation is stateless so
    /// substream(i) is the same no matter how many draws were taken.
    RandomStream substream(std::uint64_t index) const;

    std::uint64_t next_u64();

    /// Uniform draw strictly inside (0,1) with 53-bit resolution.
    double next_uniform();

    /// Standard normal draw via the inverse CDF (one uniform per draw).
    double next_normal();

private:
    struct RawTag {};
    RandomStream(std::uint64_t key, RawTag) : key_(key) {}

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// One draw from a bivariate normal with the given means, standard
/// deviations and correlation: x2 = mean2 + sd2*(rho*z1 + sqrt(1-rho^2)*z2).
/// Throws std::domain_error unless sd1, sd2 > 0 and |rho| < 1.
std::pair<double, double> bivariate_normal_sample(double mean1, double mean2,
                                                  double sd1, double sd2,
                                                  double rho, RandomStream& rng);

/// Deterministic 64-bit mix used for seed/substream derivation.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

}  // namespace brivw
