#include "brivw/estimators.hpp"

#include <cmath>
#include <vector>

#include <doctest.h>

#include "brivw/random.hpp"
#include "brivw/rao_blackwell.hpp"
#include "brivw/stat_kernels.hpp"

using namespace brivw;

namespace {

SnpPair adjusted_pair(double gamma, double se_gamma, double Gamma, double se_Gamma) {
    SnpPair p;
    p.gamma_hat = gamma;
    p.se_gamma_raw = p.se_gamma = se_gamma;
    p.Gamma_hat = Gamma;
    p.se_Gamma_raw = p.se_Gamma = se_Gamma;
    p.adjusted = true;
    return p;
}

RbRecord record(double g, double G, double var, double cov, double sg, double sG) {
    RbRecord r;
    r.gamma_rb = g;
    r.Gamma_rb = G;
    r.var_gamma_rb = var;
    r.cov_rb = cov;
    r.se_gamma = sg;
    r.se_Gamma = sG;
    return r;
}

SelectionOutcome fake_selection(std::size_t n) {
    SelectionOutcome sel;
    for (std::size_t j = 0; j < n; ++j) {
        sel.selected.push_back(j);
        sel.z_values.push_back(0.0);
        sel.s_values.push_back(1.0);
    }
    return sel;
}

// random fixture (pairs + matching records) for the equivariance checks
struct Fixture {
    std::vector<SnpPair> pairs;
    SelectionOutcome sel;
    std::vector<RbRecord> records_rho;
    std::vector<RbRecord> records_zero;
    SelectionConfig cfg;
    double rho;
};

Fixture random_fixture(std::uint64_t seed, double rho, std::size_t n = 60) {
    Fixture f;
    f.rho = rho;
    f.cfg = SelectionConfig{2.5, 0.5, seed};
    RandomStream rng(seed);
    for (std::size_t j = 0; j < n; ++j) {
        double t = 3.0 + 4.0 * rng.next_uniform();
        double sign = rng.next_uniform() < 0.5 ? -1.0 : 1.0;
        double sg = 0.005 + 0.01 * rng.next_uniform();
        double sG = 0.005 + 0.01 * rng.next_uniform();
        f.pairs.push_back(
            adjusted_pair(sign * t * sg, sg, 0.4 * sign * t * sg + 0.01 * rng.next_normal(),
                          sG));
    }
    f.sel = select(f.pairs, f.cfg);
    f.records_rho = build_rb_records(f.pairs, f.sel, f.cfg, rho);
    f.records_zero = build_rb_records(f.pairs, f.sel, f.cfg, 0.0);
    return f;
}

std::vector<SnpPair> subset(const std::vector<SnpPair>& pairs, const SelectionOutcome& sel) {
    std::vector<SnpPair> out;
    for (std::size_t j : sel.selected) out.push_back(pairs[j]);
    return out;
}

}  // namespace

TEST_CASE("method names round-trip") {
    for (Method m : {Method::kIvw, Method::kDivw, Method::kRivw, Method::kBrivw}) {
        CHECK(method_from_name(method_name(m)) == m);
    }
    CHECK_THROWS_AS(method_from_name("egger"), std::invalid_argument);
}

TEST_CASE("ivw single-SNP arithmetic") {
    EstimateResult r = estimate_ivw({adjusted_pair(1.0, 0.1, 0.5, 1.0)});
    CHECK(r.beta_hat == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.var_hat == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.n_selected == 1);
    CHECK(r.ci_low <= r.beta_hat);
    CHECK(r.beta_hat <= r.ci_high);
}

TEST_CASE("ivw exact fit recovers the proportionality constant") {
    std::vector<SnpPair> pairs;
    RandomStream rng(5);
    for (int i = 0; i < 30; ++i) {
        double g = rng.next_normal();
        pairs.push_back(adjusted_pair(g, 0.1, 2.5 * g, 0.3));
    }
    EstimateResult r = estimate_ivw(pairs);
    CHECK(r.beta_hat == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("ivw error paths") {
    CHECK_THROWS_AS(estimate_ivw({}), EstimationError);
    CHECK_THROWS_AS(estimate_ivw({adjusted_pair(0.0, 0.1, 1.0, 1.0)}), EstimationError);
    SnpPair raw = adjusted_pair(1.0, 0.1, 1.0, 1.0);
    raw.adjusted = false;
    CHECK_THROWS_AS(estimate_ivw({raw}), std::invalid_argument);
    CHECK_THROWS_AS(estimate_ivw({adjusted_pair(1.0, 0.1, 1.0, 1.0)}, 1.5), std::invalid_argument);
}

TEST_CASE("divw single-SNP arithmetic surfaces through the degenerate error") {
    std::vector<SnpPair> one{adjusted_pair(1.0, 0.5, 0.75, 1.0)};
    try {
        estimate_divw(one);
        FAIL("expected DegenerateInferenceError");
    } catch (const DegenerateInferenceError& e) {
        CHECK(e.beta_hat() == doctest::Approx(0.75 / 0.75).epsilon(1e-15));
    }
}

TEST_CASE("divw equals ivw when the exposure SEs vanish") {
    std::vector<SnpPair> a, b;
    RandomStream rng(8);
    for (int i = 0; i < 25; ++i) {
        double g = 1.0 + rng.next_uniform();
        double G = 0.3 * g + 0.01 * rng.next_normal();
        a.push_back(adjusted_pair(g, 1e-9, G, 0.5));
        b.push_back(a.back());
    }
    CHECK(estimate_divw(a).beta_hat == doctest::Approx(estimate_ivw(b).beta_hat).epsilon(1e-12));
}

TEST_CASE("divw weak-instrument guard names the cause") {
    // gamma_hat^2 < se_gamma^2 for every SNP: corrected denominator < 0
    std::vector<SnpPair> weak;
    for (int i = 0; i < 5; ++i) weak.push_back(adjusted_pair(0.001, 0.1, 0.0, 1.0));
    try {
        estimate_divw(weak);
        FAIL("expected EstimationError");
    } catch (const EstimationError& e) {
        CHECK(std::string(e.what()).find("weak") != std::string::npos);
    }
}

TEST_CASE("brivw single-record substitution value") {
    SelectionOutcome sel = fake_selection(1);
    std::vector<RbRecord> recs{record(1.0, 2.0, 0.0, 0.0, 0.1, 1.0)};
    try {
        estimate_brivw(recs, sel);
        FAIL("expected DegenerateInferenceError");
    } catch (const DegenerateInferenceError& e) {
        CHECK(e.beta_hat() == doctest::Approx(2.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(brivw_variance(recs, sel, 2.0), DegenerateInferenceError);
}

TEST_CASE("brivw weak-instrument guard reports kappa") {
    SelectionOutcome sel = fake_selection(3);
    std::vector<RbRecord> recs{record(0.01, 0.0, 0.01, 0.0, 0.1, 1.0),
                               record(0.01, 0.0, 0.02, 0.0, 0.1, 1.0),
                               record(-0.01, 0.0, 0.03, 0.0, 0.1, 1.0)};
    try {
        estimate_brivw(recs, sel);
        FAIL("expected EstimationError");
    } catch (const EstimationError& e) {
        CHECK(std::string(e.what()).find("kappa") != std::string::npos);
    }
}

TEST_CASE("brivw_variance closed arithmetic on constructed inputs") {
    // equal residuals r, equal se_Gamma: V = n r^2 / (D sG^2)^2 with
    // D = sum(den)/sG^2
    const double sG = 2.0;
    SelectionOutcome sel = fake_selection(3);
    // den terms 1 each; prod = beta*den + r with beta = 0.5, r = 0.25
    const double beta = 0.5, r = 0.25;
    std::vector<RbRecord> recs{record(1.0, beta + r, 0.0, 0.0, 0.1, sG),
                               record(1.0, beta + r, 0.0, 0.0, 0.1, sG),
                               record(1.0, beta + r, 0.0, 0.0, 0.1, sG)};
    double D = 3.0 / (sG * sG);
    double want = (3.0 * r * r / (sG * sG * sG * sG)) / (D * D);
    CHECK(brivw_variance(recs, sel, beta) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("rivw refuses records carrying covariance corrections") {
    Fixture f = random_fixture(11, 0.3);
    CHECK_THROWS_AS(estimate_rivw(f.records_rho, f.sel), std::invalid_argument);
}

TEST_CASE("rivw equals brivw on rho-zero records") {
    Fixture f = random_fixture(13, 0.0);
    EstimateResult a = estimate_rivw(f.records_zero, f.sel);
    EstimateResult b = estimate_brivw(f.records_zero, f.sel);
    CHECK(a.beta_hat == b.beta_hat);
    CHECK(a.var_hat == b.var_hat);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.p_value == b.p_value);
    CHECK(a.kappa_hat == b.kappa_hat);
}

TEST_CASE("rivw approaches divw when the corrections vanish") {
    // eta -> infinity surrogate: corrections are O(1/eta^2)
    Fixture f = random_fixture(17, 0.0);
    SelectionConfig wide = f.cfg;
    wide.eta = 1e6;
    auto records = build_rb_records(f.pairs, f.sel, wide, 0.0);
    EstimateResult a = estimate_rivw(records, f.sel);
    EstimateResult b = estimate_divw(subset(f.pairs, f.sel));
    CHECK(a.beta_hat == doctest::Approx(b.beta_hat).epsilon(1e-9));
}

TEST_CASE("outcome-scale equivariance") {
    // multiplying every outcome-side quantity (Gamma_hat, se_Gamma) by k
    // scales beta_hat and sqrt(V) by exactly k for every method
    const double k = 7.25;
    Fixture f = random_fixture(19, 0.3);

    std::vector<SnpPair> scaled_pairs = f.pairs;
    for (SnpPair& p : scaled_pairs) {
        p.Gamma_hat *= k;
        p.se_Gamma_raw *= k;
        p.se_Gamma *= k;
    }
    auto scaled_records = build_rb_records(scaled_pairs, f.sel, f.cfg, f.rho);

    EstimateResult base_b = estimate_brivw(f.records_rho, f.sel);
    EstimateResult scaled_b = estimate_brivw(scaled_records, f.sel);
    CHECK(scaled_b.beta_hat / k == doctest::Approx(base_b.beta_hat).epsilon(1e-12));
    CHECK(std::sqrt(scaled_b.var_hat) / k ==
          doctest::Approx(std::sqrt(base_b.var_hat)).epsilon(1e-12));

    EstimateResult base_i = estimate_ivw(subset(f.pairs, f.sel));
    EstimateResult scaled_i = estimate_ivw(subset(scaled_pairs, f.sel));
    CHECK(scaled_i.beta_hat / k == doctest::Approx(base_i.beta_hat).epsilon(1e-12));
    CHECK(std::sqrt(scaled_i.var_hat) / k ==
          doctest::Approx(std::sqrt(base_i.var_hat)).epsilon(1e-12));

    EstimateResult base_d = estimate_divw(subset(f.pairs, f.sel));
    EstimateResult scaled_d = estimate_divw(subset(scaled_pairs, f.sel));
    CHECK(scaled_d.beta_hat / k == doctest::Approx(base_d.beta_hat).epsilon(1e-12));
}

TEST_CASE("sign equivariance") {
    // negating all outcome estimates (and rho, so the covariance
    // corrections follow) negates beta_hat
    Fixture f = random_fixture(23, 0.3);
    std::vector<SnpPair> flipped = f.pairs;
    for (SnpPair& p : flipped) p.Gamma_hat = -p.Gamma_hat;
    auto flipped_records = build_rb_records(flipped, f.sel, f.cfg, -f.rho);

    CHECK(estimate_brivw(flipped_records, f.sel).beta_hat ==
          doctest::Approx(-estimate_brivw(f.records_rho, f.sel).beta_hat).epsilon(1e-12));
    CHECK(estimate_ivw(subset(flipped, f.sel)).beta_hat ==
          doctest::Approx(-estimate_ivw(subset(f.pairs, f.sel)).beta_hat).epsilon(1e-12));
}

TEST_CASE("estimate results satisfy the CI and p-value invariants") {
    Fixture f = random_fixture(29, 0.2);
    for (double alpha : {0.05, 0.1}) {
        EstimateResult r = estimate_brivw(f.records_rho, f.sel, alpha);
        double z = norm_quantile(1.0 - alpha / 2.0);
        double half = z * std::sqrt(r.var_hat);
        CHECK(r.ci_low == doctest::Approx(r.beta_hat - half).epsilon(1e-14));
        CHECK(r.ci_high == doctest::Approx(r.beta_hat + half).epsilon(1e-14));
        CHECK(r.p_value ==
              doctest::Approx(2.0 * norm_sf(std::fabs(r.beta_hat) / std::sqrt(r.var_hat)))
                  .epsilon(1e-14));
        CHECK(r.var_hat >= 0.0);
    }
}

TEST_CASE("predicted bias trivial limits") {
    std::vector<double> gamma{0.01, 0.02, -0.015};
    std::vector<double> tiny_sg{1e-9, 1e-9, 1e-9};
    std::vector<double> sG{0.01, 0.01, 0.01};
    CHECK(std::fabs(predicted_bias_ivw(gamma, tiny_sg, sG, 0.0, 0.4)) < 1e-12);
    CHECK(std::fabs(predicted_bias_divw(gamma, tiny_sg, sG, 0.0)) < 1e-12);

    // rho = beta*sg/sG for all SNPs: the IVW numerator cancels exactly
    const double beta = 0.3, sg_v = 0.01, sG_v = 0.02;
    double rho = beta * sg_v / sG_v;
    std::vector<double> sg(3, sg_v), sGv(3, sG_v);
    CHECK(std::fabs(predicted_bias_ivw(gamma, sg, sGv, rho, beta)) < 1e-15);
}

TEST_CASE("predicted dIVW bias closed arithmetic") {
    // equal sigmas: bias = rho*sg*sG*p / sum(gamma^2)
    std::vector<double> gamma{0.01, 0.01};
    std::vector<double> sg(2, 0.01), sG(2, 0.01);
    double want = 0.3 * 0.01 * 0.01 * 2.0 / (2.0 * 1e-4);
    CHECK(predicted_bias_divw(gamma, sg, sG, 0.3) == doctest::Approx(want).epsilon(1e-13));
}
