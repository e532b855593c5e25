#include "brivw/random.hpp"

#include <cmath>
#include <stdexcept>

#include "brivw/stat_kernels.hpp"

namespace brivw {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Stafford mix13).
std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

RandomStream RandomStream::substream(std::uint64_t index) const {
    return RandomStream(mix64(key_ ^ mix64(index + 0xD1B54A32D192ED03ULL)), RawTag{});
}

std::uint64_t RandomStream::next_u64() {
    return mix64(key_ + (++counter_) * kGolden);
}

double RandomStream::next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
    return norm_quantile(next_uniform());
}

std::pair<double, double> bivariate_normal_sample(double mean1, double mean2,
                                                  double sd1, double sd2,
                                                  double rho, RandomStream& rng) {
    if (!(sd1 > 0.0) || !(sd2 > 0.0)) {
        throw std::domain_error("bivariate_normal_sample: standard deviations must be > 0");
    }
    if (!(std::fabs(rho) < 1.0)) {
        throw std::domain_error("bivariate_normal_sample: |rho| must be < 1");
    }
    double z1 = rng.next_normal();
    double z2 = rng.next_normal();
    double x1 = mean1 + sd1 * z1;
    double x2 = mean2 + sd2 * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2);
    return {x1, x2};
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base ^ mix64(index + kGolden));
}

}  // namespace brivw
