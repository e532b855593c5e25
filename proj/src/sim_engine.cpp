#include "brivw/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "brivw/numeric.hpp"
#include "brivw/rao_blackwell.hpp"
#include "brivw/stat_kernels.hpp"

namespace brivw {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// |t| bounds for p in (5e-10, 5e-8), used for the iv_proportion column.
const double kTLower = norm_quantile(1.0 - 5e-8 / 2.0);
const double kTUpper = norm_quantile(1.0 - 5e-10 / 2.0);

}  // namespace

std::string effect_dist_name(EffectDist d) {
    return d == EffectDist::kNormal ? "normal" : "uniform";
}

EffectDist effect_dist_from_name(const std::string& name) {
    if (name == "normal") return EffectDist::kNormal;
    if (name == "uniform") return EffectDist::kUniform;
    throw std::invalid_argument("unknown effect distribution '" + name + "'");
}

void MixtureConfig::validate() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(pi_x) || !in01(pi_y) || !in01(omega)) {
        throw std::invalid_argument("MixtureConfig: pi_x, pi_y, omega must lie in [0,1]");
    }
    if (pi_x + pi_y > 1.0) {
        throw std::invalid_argument("MixtureConfig: pi_x + pi_y must not exceed 1");
    }
    if (!(eps_x2 > 0.0) || !(tau2 >= 0.0)) {
        throw std::invalid_argument("MixtureConfig: eps_x2 must be > 0 and tau2 >= 0");
    }
    if (p == 0 || n_x == 0 || n_y == 0) {
        throw std::invalid_argument("MixtureConfig: p, n_x, n_y must be positive");
    }
    double heritability = static_cast<double>(p) * pi_x * eps_x2;
    if (!(heritability > 0.0) || !(heritability < 1.0)) {
        throw std::invalid_argument("MixtureConfig: implied heritability p*pi_x*eps_x2 = " +
                                    std::to_string(heritability) + " must lie in (0,1)");
    }
    structure().validate();
}

StructureParams MixtureConfig::structure() const {
    return StructureParams{c1, c2, rho * std::sqrt(c1 * c2)};
}

namespace {

double draw_effect(RandomStream& s, double variance, EffectDist dist) {
    if (dist == EffectDist::kNormal) {
        return std::sqrt(variance) * s.next_normal();
    }
    // Uniform with the same second moment: U(-sqrt(3v), sqrt(3v)).
    double half = std::sqrt(3.0 * variance);
    return half * (2.0 * s.next_uniform() - 1.0);
}

}  // namespace

EffectTable generate_effects(const MixtureConfig& cfg, const RandomStream& stream) {
    cfg.validate();
    EffectTable t;
    t.gamma.assign(cfg.p, 0.0);
    t.alpha.assign(cfg.p, 0.0);
    t.Gamma.assign(cfg.p, 0.0);

    const double p_valid = cfg.pi_x * (1.0 - cfg.omega);
    const double p_pleio = cfg.pi_x;                 // valid + pleiotropic
    const double p_outcome = cfg.pi_x + cfg.pi_y;    // + outcome-only

    for (std::size_t j = 0; j < cfg.p; ++j) {
        RandomStream s = stream.substream(j);
        double u = s.next_uniform();
        if (u < p_valid) {
            t.gamma[j] = draw_effect(s, cfg.eps_x2, cfg.effect_dist);
        } else if (u < p_pleio) {
            t.gamma[j] = draw_effect(s, cfg.eps_x2, cfg.effect_dist);
            t.alpha[j] = draw_effect(s, cfg.tau2, cfg.effect_dist);
        } else if (u < p_outcome) {
            t.alpha[j] = draw_effect(s, cfg.tau2, cfg.effect_dist);
        }
        t.Gamma[j] = cfg.beta * t.gamma[j] + t.alpha[j];
    }
    return t;
}

std::vector<SnpPair> generate_summary(const EffectTable& effects, const MixtureConfig& cfg,
                                      const RandomStream& stream) {
    if (effects.gamma.size() != cfg.p) {
        throw std::invalid_argument("generate_summary: effect table does not match config");
    }
    const double se_x_raw = 1.0 / std::sqrt(static_cast<double>(cfg.n_x));
    const double se_y_raw = 1.0 / std::sqrt(static_cast<double>(cfg.n_y));
    const double sd_x = cfg.c1 * se_x_raw;
    const double sd_y = cfg.c2 * se_y_raw;
    const double cross = std::sqrt(1.0 - cfg.rho * cfg.rho);

    std::vector<SnpPair> pairs(cfg.p);
    for (std::size_t j = 0; j < cfg.p; ++j) {
        RandomStream s = stream.substream(j);
        double z1 = s.next_normal();
        double z2 = s.next_normal();
        SnpPair& pr = pairs[j];
        pr.gamma_hat = effects.gamma[j] + sd_x * z1;
        pr.Gamma_hat = effects.Gamma[j] + sd_y * (cfg.rho * z1 + cross * z2);
        pr.se_gamma_raw = se_x_raw;
        pr.se_Gamma_raw = se_y_raw;
    }
    return pairs;
}

namespace {

struct ReplicateOutcome {
    struct PerMethod {
        bool ok = false;
        double beta = kNan;
        double se = kNan;
        double ci_low = kNan;
        double ci_high = kNan;
        double p_value = kNan;
        std::size_t n_selected = 0;
    };
    std::vector<PerMethod> methods;
    double iv_proportion = kNan;
};

ReplicateOutcome run_replicate(const MixtureConfig& cfg, const SelectionConfig& sel,
                               const std::vector<Method>& methods, std::size_t replicate,
                               double alpha) {
    RandomStream rep_root = RandomStream(cfg.seed).substream(replicate);
    EffectTable effects = generate_effects(cfg, rep_root.substream(0));
    std::vector<SnpPair> raw = generate_summary(effects, cfg, rep_root.substream(1));
    AdjustResult adj = adjust(raw, cfg.structure());

    SelectionConfig rep_sel = sel;
    rep_sel.seed = mix_seed(sel.seed, replicate);
    SelectionOutcome outcome = select(adj.pairs, rep_sel);

    // Share of borderline-significant instruments among the significant
    // ones, from the raw t-scores.
    std::size_t n_sig = 0, n_band = 0;
    for (const SnpPair& pr : adj.pairs) {
        double t = std::fabs(pr.gamma_hat / pr.se_gamma_raw);
        if (t > kTLower) {
            ++n_sig;
            if (t < kTUpper) ++n_band;
        }
    }

    std::vector<SnpPair> selected_pairs;
    selected_pairs.reserve(outcome.n_selected());
    for (std::size_t j : outcome.selected) selected_pairs.push_back(adj.pairs[j]);

    double rho = cfg.structure().rho();
    std::vector<RbRecord> records_full;
    std::vector<RbRecord> records_zero;

    ReplicateOutcome out;
    out.methods.resize(methods.size());
    if (n_sig > 0) {
        out.iv_proportion = static_cast<double>(n_band) / static_cast<double>(n_sig);
    }

    for (std::size_t m = 0; m < methods.size(); ++m) {
        auto& slot = out.methods[m];
        try {
            EstimateResult res;
            switch (methods[m]) {
                case Method::kIvw:
                    res = estimate_ivw(selected_pairs, alpha);
                    break;
                case Method::kDivw:
                    res = estimate_divw(selected_pairs, alpha);
                    break;
                case Method::kRivw:
                    if (records_zero.empty() && outcome.n_selected() > 0) {
                        records_zero = build_rb_records(adj.pairs, outcome, rep_sel, 0.0);
                    }
                    res = estimate_rivw(records_zero, outcome, alpha);
                    break;
                case Method::kBrivw:
                    if (records_full.empty() && outcome.n_selected() > 0) {
                        records_full = build_rb_records(adj.pairs, outcome, rep_sel, rho);
                    }
                    res = estimate_brivw(records_full, outcome, alpha);
                    break;
            }
            slot.ok = true;
            slot.beta = res.beta_hat;
            slot.se = std::sqrt(res.var_hat);
            slot.ci_low = res.ci_low;
            slot.ci_high = res.ci_high;
            slot.p_value = res.p_value;
            slot.n_selected = res.n_selected;
        } catch (const EstimationError&) {
            slot.ok = false;
            slot.n_selected = outcome.n_selected();
        }
    }
    return out;
}

}  // namespace

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

McResult run_mc(const MixtureConfig& cfg, const SelectionConfig& sel,
                const std::vector<Method>& methods, std::size_t replicates,
                double alpha, int workers) {
    cfg.validate();
    sel.validate();
    if (replicates == 0) throw std::invalid_argument("run_mc: replicates must be >= 1");
    if (methods.empty()) throw std::invalid_argument("run_mc: no methods requested");
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("run_mc: alpha must lie in (0,1)");
    }

    std::vector<ReplicateOutcome> results(replicates);
    int n_workers = std::min<int>(resolve_workers(workers), static_cast<int>(replicates));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t r = next.fetch_add(1);
            if (r >= replicates) break;
            results[r] = run_replicate(cfg, sel, methods, r, alpha);
        }
    };
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // Deterministic reduction: replicate order, compensated sums.
    McResult out;
    out.by_method.reserve(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) {
        McReport rep;
        rep.method = methods[m];
        CompensatedSum sum_err, sum_err2, sum_sel, sum_se;
        std::size_t n_ok = 0, n_cover = 0, n_reject = 0;
        for (std::size_t r = 0; r < replicates; ++r) {
            const auto& slot = results[r].methods[m];
            if (!slot.ok) {
                ++rep.n_failures;
                continue;
            }
            ++n_ok;
            double err = slot.beta - cfg.beta;
            sum_err.add(err);
            sum_err2.add(err * err);
            sum_sel.add(static_cast<double>(slot.n_selected));
            sum_se.add(slot.se);
            if (slot.ci_low <= cfg.beta && cfg.beta <= slot.ci_high) ++n_cover;
            if (slot.p_value < alpha) ++n_reject;
        }
        rep.n_replicates = n_ok;
        if (n_ok > 0) {
            double n = static_cast<double>(n_ok);
            rep.bias = sum_err.value() / n;
            rep.bias_proportion = (cfg.beta != 0.0) ? rep.bias / cfg.beta : kNan;
            rep.mse = sum_err2.value() / n;
            rep.coverage = static_cast<double>(n_cover) / n;
            rep.rejection_rate = static_cast<double>(n_reject) / n;
            rep.mean_selected = sum_sel.value() / n;
            rep.mean_se = sum_se.value() / n;
            double var = rep.mse - rep.bias * rep.bias;
            rep.mc_se_bias = (n > 1 && var > 0.0) ? std::sqrt(var / n) : 0.0;
        } else {
            rep.bias = rep.bias_proportion = rep.mse = kNan;
            rep.coverage = rep.rejection_rate = rep.mean_selected = kNan;
            rep.mean_se = kNan;
            rep.mc_se_bias = kNan;
        }
        out.by_method.push_back(rep);
    }

    CompensatedSum sum_iv;
    std::size_t n_iv = 0;
    for (std::size_t r = 0; r < replicates; ++r) {
        if (std::isfinite(results[r].iv_proportion)) {
            sum_iv.add(results[r].iv_proportion);
            ++n_iv;
        }
    }
    out.iv_proportion = n_iv > 0 ? sum_iv.value() / static_cast<double>(n_iv) : kNan;
    return out;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_row(std::ostream& os, std::size_t cell, const MixtureConfig& mix,
               const SelectionConfig& sel, const SweepOptions& opts, double iv_prop,
               const std::string& method, const std::string& metric, double value,
               const std::string& status, const std::string& note) {
    os << cell << ',' << fmt17(mix.beta) << ',' << mix.p << ',' << fmt17(mix.pi_x) << ','
       << fmt17(mix.pi_y) << ',' << fmt17(mix.omega) << ',' << fmt17(mix.eps_x2) << ','
       << fmt17(mix.tau2) << ',' << mix.n_x << ',' << mix.n_y << ',' << fmt17(mix.rho) << ','
       << fmt17(mix.c1) << ',' << fmt17(mix.c2) << ',' << effect_dist_name(mix.effect_dist)
       << ',' << mix.seed << ',' << fmt17(sel.lambda) << ',' << fmt17(sel.eta) << ','
       << sel.seed << ',' << opts.replicates << ',' << fmt17(opts.alpha) << ','
       << fmt17(iv_prop) << ',' << method << ',' << metric << ',' << fmt17(value) << ','
       << status << ',' << note << '\n';
}

}  // namespace

void sweep(const std::vector<SweepCell>& grid, const SweepOptions& opts, std::ostream& csv) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");

    csv << "cell,beta,p,pi_x,pi_y,omega,eps_x2,tau2,n_x,n_y,rho,c1,c2,effect_dist,"
           "mix_seed,lambda,eta,sel_seed,replicates,alpha,iv_proportion,"
           "method,metric,value,status,note\n";

    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
        const SweepCell& c = grid[cell];
        McResult result;
        try {
            result = run_mc(c.mix, c.sel, opts.methods, opts.replicates, opts.alpha,
                            opts.workers);
        } catch (const std::exception& e) {
            std::string note = e.what();
            for (char& ch : note) {
                if (ch == ',' || ch == '\n') ch = ';';
            }
            write_row(csv, cell, c.mix, c.sel, opts, kNan, "-", "-", kNan, "infeasible", note);
            continue;
        }
        for (const McReport& rep : result.by_method) {
            const std::string name = method_name(rep.method);
            auto row = [&](const char* metric, double value) {
                write_row(csv, cell, c.mix, c.sel, opts, result.iv_proportion, name, metric,
                          value, "ok", "");
            };
            row("bias", rep.bias);
            row("bias_proportion", rep.bias_proportion);
            row("mse", rep.mse);
            row("coverage", rep.coverage);
            row("rejection_rate", rep.rejection_rate);
            row("mean_selected", rep.mean_selected);
            row("mean_se", rep.mean_se);
            row("mc_se_bias", rep.mc_se_bias);
            row("n_replicates", static_cast<double>(rep.n_replicates));
            row("n_failures", static_cast<double>(rep.n_failures));
        }
    }
}

}  // namespace brivw
