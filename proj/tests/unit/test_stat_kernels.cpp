#include "brivw/stat_kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <doctest.h>

#include "brivw/random.hpp"

using namespace brivw;

namespace {

// Reference values computed with a 60-digit arbitrary-precision evaluation
// of the exact formulas.
constexpr double kLambda5e5 = 4.055626981122401;   // Phi^-1(1 - 5e-5/2)
constexpr double kLambda5e8 = 5.451310437845478;   // Phi^-1(1 - 5e-8/2)
constexpr double kPhi10 = 7.694598626706419e-23;
constexpr double kPhiAtZero = 0.3989422804014327;

double rel_err(double got, double want) {
    if (want == 0.0) return std::fabs(got);
    return std::fabs(got - want) / std::fabs(want);
}

// Direct textbook evaluation, valid away from the tails; the stable
// implementation must agree with it in the no-cancellation regime.
double naive_rb_ratio(double ap, double am) {
    return (norm_pdf(ap) - norm_pdf(am)) / (1.0 - norm_cdf(ap) + norm_cdf(am));
}

double naive_rb_ratio_second(double ap, double am) {
    return (ap * norm_pdf(ap) - am * norm_pdf(am)) / (1.0 - norm_cdf(ap) + norm_cdf(am));
}

}  // namespace

TEST_CASE("norm_pdf basics") {
    CHECK(norm_pdf(0.0) == doctest::Approx(kPhiAtZero).epsilon(1e-15));
    CHECK(rel_err(norm_pdf(10.0), kPhi10) < 1e-14);
    CHECK(norm_pdf(std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(norm_pdf(3.0) == norm_pdf(-3.0));
}

TEST_CASE("norm_cdf basics and symmetry") {
    CHECK(norm_cdf(0.0) == 0.5);
    CHECK(rel_err(norm_cdf(1.0), 0.8413447460685429) < 1e-15);
    CHECK(rel_err(norm_cdf(-5.5), 1.898956246588772e-8) < 1e-14);
    CHECK(rel_err(norm_cdf(-20.0), 2.753624118606234e-89) < 1e-13);
    CHECK(rel_err(norm_cdf(-37.5), 4.605353009581955e-308) < 1e-12);

    // Phi(x) + Phi(-x) = 1 within 1e-15 for |x| <= 8
    RandomStream rng(7);
    for (int i = 0; i < 2000; ++i) {
        double x = 16.0 * (rng.next_uniform() - 0.5);
        CHECK(std::fabs(norm_cdf(x) + norm_cdf(-x) - 1.0) <= 1e-15);
    }
}

TEST_CASE("norm_sf matches the complementary cdf") {
    for (double x : {-9.0, -2.0, 0.0, 0.5, 3.0, 11.5, 25.0}) {
        CHECK(norm_sf(x) == norm_cdf(-x));
    }
}

TEST_CASE("log_norm_sf agrees across the asymptotic switch") {
    // direct values around and beyond the deep-tail cutover
    CHECK(rel_err(log_norm_sf(36.0), std::log(4.182624065797283e-284)) < 1e-13);
    CHECK(rel_err(log_norm_sf(40.0), -804.60844201375379) < 1e-14);
    CHECK(rel_err(log_norm_sf(100.0), -5005.5242086942051) < 1e-14);
    // continuity at the switch
    double below = log_norm_sf(std::nextafter(36.0, 0.0));
    double above = log_norm_sf(36.0);
    CHECK(std::fabs(below - above) < 1e-10 * std::fabs(above));
}

TEST_CASE("norm_quantile frozen values") {
    CHECK(rel_err(norm_quantile(1.0 - 5e-8 / 2.0), kLambda5e8) < 1e-9);
    CHECK(rel_err(norm_quantile(1.0 - 5e-5 / 2.0), kLambda5e5) < 1e-12);
    CHECK(rel_err(norm_quantile(0.975), 1.959963984540054) < 1e-14);
    CHECK(rel_err(norm_quantile(0.3), -0.5244005127080407) < 1e-14);
    CHECK(rel_err(norm_quantile(1e-300), -37.0470962993612) < 1e-14);
    CHECK(norm_quantile(0.5) == 0.0);
}

TEST_CASE("norm_quantile domain errors") {
    CHECK_THROWS_AS(norm_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(norm_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(norm_quantile(-0.25), std::domain_error);
    CHECK_THROWS_AS(norm_quantile(std::numeric_limits<double>::quiet_NaN()),
                    std::domain_error);
}

TEST_CASE("norm_quantile inverts norm_cdf over the full range") {
    // p spanning [1e-300, 1-1e-16]; cdf(quantile(p)) must match p to 1e-12
    // relative accuracy.
    RandomStream rng(11);
    for (int e = -300; e <= -1; e += 3) {
        double p = std::pow(10.0, e) * (0.2 + rng.next_uniform());
        if (p >= 1.0) continue;
        double x = norm_quantile(p);
        CHECK(rel_err(norm_cdf(x), p) < 1e-12);
    }
    for (int i = 0; i < 2000; ++i) {
        double p = rng.next_uniform();
        double x = norm_quantile(p);
        CHECK(rel_err(norm_cdf(x), p) < 1e-13);
    }
    // right tail: verify through the survival function; compare against
    // the tail mass of the representable argument (1-p is exact for
    // p >= 0.5, so q_eff is the exact complement the function saw)
    for (double q : {1e-16, 1e-12, 2.5e-8, 1e-5, 0.01}) {
        double p = 1.0 - q;
        double q_eff = 1.0 - p;
        double x = norm_quantile(p);
        CHECK(rel_err(norm_sf(x), q_eff) < 1e-12);
    }
}

TEST_CASE("make_ratio_inputs geometry") {
    RatioInputs r = make_ratio_inputs(2.0, 1.96, 0.5);
    CHECK(r.a_plus == doctest::Approx(-4.0 + 3.92).epsilon(1e-15));
    CHECK(r.a_minus == doctest::Approx(-4.0 - 3.92).epsilon(1e-15));
    CHECK(r.a_plus - r.a_minus == doctest::Approx(2.0 * 1.96 / 0.5).epsilon(1e-15));
    CHECK_THROWS_AS(make_ratio_inputs(0.0, -1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(make_ratio_inputs(0.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("rb_ratio trivial shapes") {
    // symmetric bounds: numerator is an exact zero
    for (double c : {0.0, 0.5, 3.0, 10.0, 25.0, 40.0}) {
        CHECK(rb_ratio({c, -c}) == 0.0);
    }
    // equal bounds (lambda = 0): no correction
    for (double a : {-3.0, 0.0, 1.5, 9.0}) {
        CHECK(rb_ratio({a, a}) == 0.0);
    }
}

TEST_CASE("rb_ratio frozen tail values") {
    // lower tail dominating the acceptance mass
    CHECK(rel_err(rb_ratio({30.0, -10.0}), -10.098093233962512) < 1e-13);
    // same bounds but mass ~ 1: essentially -phi(10)
    CHECK(rel_err(rb_ratio({30.0, 10.0}), -7.6945986267064193e-23) < 1e-13);
    // upper tail dominating
    CHECK(rel_err(rb_ratio({10.0, -40.0}), 10.098093233962512) < 1e-13);
    CHECK(rel_err(rb_ratio({12.0, -40.0}), 12.082214175254284) < 1e-13);
    // both tails under the double range: log-domain path
    CHECK(rel_err(rb_ratio({39.0, -38.5}), -38.525938802047056) < 1e-12);
    CHECK(rel_err(rb_ratio({40.0, -36.0}), -36.027735075281061) < 1e-12);
    CHECK(rb_ratio({40.0, -40.0}) == 0.0);
    // moderate regime
    CHECK(rel_err(rb_ratio({5.0, -3.0}), -3.2813005121022665) < 1e-13);
    CHECK(rel_err(rb_ratio({2.0, -1.0}), -1.0362413281967338) < 1e-13);
    CHECK(rel_err(rb_ratio({0.5, -2.5}), 1.0628752915489387) < 1e-13);
}

TEST_CASE("rb_ratio_second trivial and frozen values") {
    CHECK(rb_ratio_second({0.0, 0.0}) == 0.0);
    // symmetric bounds: c*phi(c)/Phi(-c)
    double c = 2.0;
    CHECK(rel_err(rb_ratio_second({c, -c}), 4.7464310656456817) < 1e-13);
    CHECK(rel_err(rb_ratio_second({30.0, -10.0}), 100.98093233962512) < 1e-13);
    CHECK(rel_err(rb_ratio_second({30.0, 10.0}), -7.6945986267064193e-22) < 1e-13);
    CHECK(rel_err(rb_ratio_second({10.0, -40.0}), 100.98093233962512) < 1e-13);
    CHECK(rel_err(rb_ratio_second({39.0, -38.5}), 1483.2486553762039) < 1e-12);
    CHECK(rel_err(rb_ratio_second({40.0, -36.0}), 1296.9984627101182) < 1e-12);
    CHECK(rel_err(rb_ratio_second({5.0, -3.0}), 9.8527105209337532) < 1e-13);
}

TEST_CASE("rb_ratio antisymmetry under joint reflection") {
    RandomStream rng(23);
    for (int i = 0; i < 5000; ++i) {
        double lo = 80.0 * (rng.next_uniform() - 0.5);
        double width = 40.0 * rng.next_uniform();
        double ap = lo + width, am = lo;
        double a = rb_ratio({ap, am});
        double b = rb_ratio({-am, -ap});
        CHECK(a == doctest::Approx(-b).epsilon(1e-12));
        CHECK(std::isfinite(a));
    }
}

TEST_CASE("rb ratios agree with the naive formula away from the tails") {
    RandomStream rng(31);
    for (int i = 0; i < 20000; ++i) {
        double lo = -5.0 + 10.0 * rng.next_uniform();
        double hi = lo + (5.0 - lo) * rng.next_uniform();
        if (std::fabs(hi) > 5.0 || std::fabs(lo) > 5.0) continue;
        RatioInputs r{hi, lo};
        double naive = naive_rb_ratio(hi, lo);
        double naive2 = naive_rb_ratio_second(hi, lo);
        if (std::fabs(naive) > 1e-12) CHECK(rel_err(rb_ratio(r), naive) < 1e-10);
        if (std::fabs(naive2) > 1e-12) CHECK(rel_err(rb_ratio_second(r), naive2) < 1e-10);
    }
}

TEST_CASE("rb ratios stay finite over the whole contract range") {
    RandomStream rng(37);
    for (int i = 0; i < 20000; ++i) {
        double lo = 80.0 * (rng.next_uniform() - 0.5);
        double hi = lo + 80.0 * rng.next_uniform();
        if (hi > 40.0) hi = 40.0;
        if (lo < -40.0) lo = -40.0;
        if (hi < lo) continue;
        CHECK(std::isfinite(rb_ratio({hi, lo})));
        CHECK(std::isfinite(rb_ratio_second({hi, lo})));
    }
}
