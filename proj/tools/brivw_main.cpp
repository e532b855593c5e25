#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "brivw/diagnostics.hpp"
#include "brivw/estimators.hpp"
#include "brivw/gwas.hpp"
#include "brivw/rao_blackwell.hpp"
#include "brivw/selection.hpp"
#include "brivw/sim.hpp"
#include "brivw/stat_kernels.hpp"
#include "brivw/structure.hpp"

using json = nlohmann::json;
using namespace brivw;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

void write_manifest(const std::string& path, const std::string& command, json parameters) {
    json manifest;
    manifest["command"] = command;
    manifest["version"] = kVersion;
    manifest["timestamp"] = timestamp_utc();
    manifest["parameters"] = std::move(parameters);
    write_file(path, manifest.dump(2) + "\n");
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("BRIVW_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 1;
}

std::vector<Method> parse_methods(const std::string& csv) {
    std::vector<Method> methods;
    std::stringstream ss(csv);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (!name.empty()) methods.push_back(method_from_name(name));
    }
    if (methods.empty()) throw std::invalid_argument("no methods requested");
    return methods;
}

std::string methods_csv(const std::vector<Method>& methods) {
    std::string out;
    for (const Method& m : methods) {
        if (!out.empty()) out += ',';
        out += method_name(m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateParams {
    std::string exposure_path;
    std::string outcome_path;
    std::string ld_path;
    std::string column_map_path;
    std::string structure_file;
    double c1 = 1.0;
    double c2 = 1.0;
    double c12 = 0.0;
    bool c12_given = false;
    std::string inflation_scale = "sd";
    double lambda_p = 5e-5;
    double eta = 0.5;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    std::string methods = "ivw,divw,rivw,brivw";
    bool prune = false;
    double r2_max = 0.001;
    std::int64_t window_kb = 10000;
    std::string out_prefix;
    std::string audit_path;
};

json estimate_params_to_json(const EstimateParams& p) {
    return json{{"exposure", p.exposure_path},
                {"outcome", p.outcome_path},
                {"ld", p.ld_path},
                {"column_map", p.column_map_path},
                {"structure_file", p.structure_file},
                {"c1", p.c1},
                {"c2", p.c2},
                {"c12", p.c12},
                {"c12_given", p.c12_given},
                {"inflation_scale", p.inflation_scale},
                {"lambda_p", p.lambda_p},
                {"eta", p.eta},
                {"seed", p.seed},
                {"alpha", p.alpha},
                {"methods", p.methods},
                {"prune", p.prune},
                {"r2_max", p.r2_max},
                {"window_kb", p.window_kb},
                {"out", p.out_prefix},
                {"audit", p.audit_path}};
}

EstimateParams estimate_params_from_json(const json& j) {
    EstimateParams p;
    p.exposure_path = j.at("exposure");
    p.outcome_path = j.at("outcome");
    p.ld_path = j.value("ld", "");
    p.column_map_path = j.value("column_map", "");
    p.structure_file = j.value("structure_file", "");
    p.c1 = j.at("c1");
    p.c2 = j.at("c2");
    p.c12 = j.at("c12");
    p.c12_given = j.value("c12_given", true);
    p.inflation_scale = j.at("inflation_scale");
    p.lambda_p = j.at("lambda_p");
    p.eta = j.at("eta");
    p.seed = j.at("seed");
    p.alpha = j.at("alpha");
    p.methods = j.at("methods");
    p.prune = j.at("prune");
    p.r2_max = j.at("r2_max");
    p.window_kb = j.at("window_kb");
    p.out_prefix = j.at("out");
    p.audit_path = j.value("audit", "");
    return p;
}

json result_to_json(const EstimateResult& r) {
    return json{{"method", method_name(r.method)},
                {"beta", r.beta_hat},
                {"se", std::sqrt(r.var_hat)},
                {"var", r.var_hat},
                {"ci_low", r.ci_low},
                {"ci_high", r.ci_high},
                {"p_value", r.p_value},
                {"n_snps", r.n_selected},
                {"kappa", r.kappa_hat}};
}

void print_result_table(std::ostream& os, const json& results) {
    os << std::left << std::setw(8) << "method" << std::right << std::setw(12) << "beta"
       << std::setw(12) << "se" << std::setw(12) << "ci_low" << std::setw(12) << "ci_high"
       << std::setw(12) << "p" << std::setw(8) << "n" << std::setw(10) << "kappa" << '\n';
    for (const json& r : results) {
        if (r.contains("error")) {
            os << std::left << std::setw(8) << r["method"].get<std::string>()
               << "  failed: " << r["error"].get<std::string>() << '\n';
            continue;
        }
        os << std::left << std::setw(8) << r["method"].get<std::string>() << std::right
           << std::setw(12) << std::setprecision(5) << r["beta"].get<double>()
           << std::setw(12) << r["se"].get<double>() << std::setw(12)
           << r["ci_low"].get<double>() << std::setw(12) << r["ci_high"].get<double>()
           << std::setw(12) << std::setprecision(3) << r["p_value"].get<double>()
           << std::setw(8) << r["n_snps"].get<std::size_t>() << std::setw(10)
           << std::setprecision(4) << r["kappa"].get<double>() << '\n';
    }
}

int run_estimate(const EstimateParams& p) {
    if (!p.c12_given) {
        std::cerr << "warning: --c12 not given; assuming no sample structure (c12 = 0)\n";
    }
    StructureParams structure{p.c1, p.c2, p.c12};
    structure.validate();
    InflationScale scale =
        p.inflation_scale == "var" ? InflationScale::kVariance : InflationScale::kSd;

    ColumnMap columns;
    if (!p.column_map_path.empty()) columns = ColumnMap::from_file(p.column_map_path);

    std::ifstream exposure_in(p.exposure_path);
    if (!exposure_in) throw std::runtime_error("cannot open '" + p.exposure_path + "'");
    ParseResult exposure = parse_gwas(exposure_in, columns);
    std::ifstream outcome_in(p.outcome_path);
    if (!outcome_in) throw std::runtime_error("cannot open '" + p.outcome_path + "'");
    ParseResult outcome = parse_gwas(outcome_in, columns);

    HarmonizeResult harmonized = harmonize(exposure.rows, outcome.rows);

    std::vector<SnpPair> pairs = harmonized.pairs;
    std::size_t n_pruned_away = 0;
    if (p.prune) {
        std::vector<LdPair> ld;
        if (!p.ld_path.empty()) {
            std::ifstream ld_in(p.ld_path);
            if (!ld_in) throw std::runtime_error("cannot open '" + p.ld_path + "'");
            ld = read_ld_tsv(ld_in);
        }
        std::vector<SnpPair> pruned = sigma_prune(pairs, ld, p.r2_max, p.window_kb);
        n_pruned_away = pairs.size() - pruned.size();
        pairs = std::move(pruned);
    }

    AdjustResult adjusted = adjust(pairs, structure, scale);
    SelectionConfig sel = SelectionConfig::from_pvalue(p.lambda_p, p.eta, p.seed);
    SelectionOutcome outcome_sel = select(adjusted.pairs, sel);

    double rho = structure.rho();
    std::vector<RbRecord> records =
        build_rb_records(adjusted.pairs, outcome_sel, sel, rho);
    std::vector<RbRecord> records_zero =
        build_rb_records(adjusted.pairs, outcome_sel, sel, 0.0);
    std::vector<SnpPair> selected_pairs;
    for (std::size_t j : outcome_sel.selected) selected_pairs.push_back(adjusted.pairs[j]);

    json results = json::array();
    for (Method m : parse_methods(p.methods)) {
        try {
            EstimateResult r;
            switch (m) {
                case Method::kIvw: r = estimate_ivw(selected_pairs, p.alpha); break;
                case Method::kDivw: r = estimate_divw(selected_pairs, p.alpha); break;
                case Method::kRivw: r = estimate_rivw(records_zero, outcome_sel, p.alpha); break;
                case Method::kBrivw: r = estimate_brivw(records, outcome_sel, p.alpha); break;
            }
            results.push_back(result_to_json(r));
        } catch (const EstimationError& e) {
            results.push_back(json{{"method", method_name(m)}, {"error", e.what()}});
        }
    }

    json out;
    out["version"] = kVersion;
    out["structure"] = json{{"c1", p.c1},
                            {"c2", p.c2},
                            {"c12", p.c12},
                            {"rho", rho},
                            {"inflation_scale", p.inflation_scale}};
    out["selection"] = json{{"lambda", sel.lambda},
                            {"lambda_p", p.lambda_p},
                            {"eta", sel.eta},
                            {"seed", sel.seed},
                            {"n_candidates", adjusted.pairs.size()},
                            {"n_selected", outcome_sel.n_selected()}};
    out["counts"] = json{{"exposure_rows", exposure.rows.size()},
                         {"exposure_rejected", exposure.rejected.size()},
                         {"outcome_rows", outcome.rows.size()},
                         {"outcome_rejected", outcome.rejected.size()},
                         {"harmonized", harmonized.pairs.size()},
                         {"aligned", harmonized.counts.aligned},
                         {"flipped", harmonized.counts.flipped},
                         {"dropped_palindromic", harmonized.counts.dropped_palindromic},
                         {"dropped_mismatch", harmonized.counts.dropped_mismatch},
                         {"dropped_duplicate", harmonized.counts.dropped_duplicate},
                         {"exposure_only", harmonized.counts.exposure_only},
                         {"outcome_only", harmonized.counts.outcome_only},
                         {"pruned_away", n_pruned_away},
                         {"adjust_rejected", adjusted.rejected.size()}};
    out["results"] = results;

    write_file(p.out_prefix + ".json", out.dump(2) + "\n");
    write_manifest(p.out_prefix + ".manifest.json", "estimate", estimate_params_to_json(p));

    if (!p.audit_path.empty()) {
        std::ostringstream audit;
        audit << "id\ta_plus\ta_minus\tgamma_rb\tGamma_rb\tvar_gamma_rb\tcov_rb\n";
        char buf[40];
        auto f17 = [&buf](double v) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return std::string(buf);
        };
        for (const RbRecord& r : records) {
            audit << r.id << '\t' << f17(r.a_plus) << '\t' << f17(r.a_minus) << '\t'
                  << f17(r.gamma_rb) << '\t' << f17(r.Gamma_rb) << '\t'
                  << f17(r.var_gamma_rb) << '\t' << f17(r.cov_rb) << '\n';
        }
        write_file(p.audit_path, audit.str());
    }

    print_result_table(std::cout, results);

    bool any_ok = false;
    for (const json& r : results) any_ok = any_ok || !r.contains("error");
    return any_ok ? 0 : kExitRuntime;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateParams {
    std::string config_text;  // resolved config, stored verbatim in the manifest
    std::string out_prefix;
    int workers = 0;
};

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t");
            if (a == std::string::npos) return std::string();
            std::size_t b = s.find_last_not_of(" \t");
            return s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

std::vector<double> parse_list(const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list value '" + value + "'");
    return out;
}

struct SimGrid {
    std::vector<SweepCell> cells;
    SweepOptions opts;
};

SimGrid build_grid(const std::string& config_text) {
    auto kv = parse_kv(config_text);
    auto get = [&](const char* key, const char* fallback) -> std::string {
        auto it = kv.find(key);
        return it == kv.end() ? std::string(fallback) : it->second;
    };

    std::vector<double> betas = parse_list(get("beta", "0"));
    std::vector<double> rhos = parse_list(get("rho", "0"));
    std::vector<double> eps_list = parse_list(get("eps_x2", "5e-5"));
    std::string tau_raw = get("tau2", "follow_eps");
    bool tau_follows = tau_raw == "follow_eps";
    std::vector<double> tau_list = tau_follows ? std::vector<double>{0.0} : parse_list(tau_raw);
    std::vector<double> pi_x_list = parse_list(get("pi_x", "0.02"));
    std::vector<double> pi_y_list = parse_list(get("pi_y", "0.01"));
    std::vector<double> omega_list = parse_list(get("omega", "0"));
    std::vector<double> lambda_p_list = parse_list(get("lambda_p", "5e-5"));
    std::vector<double> eta_list = parse_list(get("eta", "0.5"));

    MixtureConfig base;
    base.p = static_cast<std::size_t>(std::stod(get("p", "200000")));
    base.n_x = static_cast<std::size_t>(std::stod(get("n_x", "100000")));
    base.n_y = static_cast<std::size_t>(std::stod(get("n_y", "100000")));
    base.c1 = std::stod(get("c1", "1"));
    base.c2 = std::stod(get("c2", "1"));
    base.effect_dist = effect_dist_from_name(get("effect_dist", "normal"));
    base.seed = std::stoull(get("seed", "1"));
    std::uint64_t sel_seed = std::stoull(get("sel_seed", "99"));

    SimGrid grid;
    grid.opts.methods = parse_methods(get("methods", "ivw,divw,rivw,brivw"));
    grid.opts.replicates = static_cast<std::size_t>(std::stod(get("replicates", "200")));
    grid.opts.alpha = std::stod(get("alpha", "0.05"));

    for (double beta : betas)
        for (double rho : rhos)
            for (double eps : eps_list)
                for (double tau : tau_list)
                    for (double pi_x : pi_x_list)
                        for (double pi_y : pi_y_list)
                            for (double omega : omega_list)
                                for (double lambda_p : lambda_p_list)
                                    for (double eta : eta_list) {
                                        SweepCell cell;
                                        cell.mix = base;
                                        cell.mix.beta = beta;
                                        cell.mix.rho = rho;
                                        cell.mix.eps_x2 = eps;
                                        cell.mix.tau2 = tau_follows ? eps : tau;
                                        cell.mix.pi_x = pi_x;
                                        cell.mix.pi_y = pi_y;
                                        cell.mix.omega = omega;
                                        cell.sel = SelectionConfig::from_pvalue(
                                            lambda_p, eta, sel_seed);
                                        grid.cells.push_back(cell);
                                    }
    if (grid.cells.size() > 100000) {
        throw std::invalid_argument("grid has " + std::to_string(grid.cells.size()) +
                                    " cells; refusing to run");
    }
    return grid;
}

int run_simulate(const SimulateParams& p) {
    SimGrid grid = build_grid(p.config_text);
    grid.opts.workers = p.workers;

    std::ostringstream csv;
    sweep(grid.cells, grid.opts, csv);
    write_file(p.out_prefix + ".csv", csv.str());

    // compact JSON summary alongside the long CSV
    json cells = json::array();
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const MixtureConfig& m = grid.cells[i].mix;
        cells.push_back(json{{"cell", i},
                             {"beta", m.beta},
                             {"rho", m.rho},
                             {"eps_x2", m.eps_x2},
                             {"tau2", m.tau2},
                             {"pi_x", m.pi_x},
                             {"pi_y", m.pi_y},
                             {"omega", m.omega},
                             {"lambda", grid.cells[i].sel.lambda},
                             {"eta", grid.cells[i].sel.eta}});
    }
    json summary;
    summary["version"] = kVersion;
    summary["n_cells"] = grid.cells.size();
    summary["replicates"] = grid.opts.replicates;
    summary["methods"] = methods_csv(grid.opts.methods);
    summary["cells"] = cells;
    write_file(p.out_prefix + ".summary.json", summary.dump(2) + "\n");

    write_manifest(p.out_prefix + ".manifest.json", "simulate",
                   json{{"config", p.config_text},
                        {"out", p.out_prefix},
                        {"workers", p.workers}});
    std::cout << "simulate: " << grid.cells.size() << " cells x " << grid.opts.replicates
              << " replicates -> " << p.out_prefix << ".csv\n";
    return 0;
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseParams {
    double rho = 0.0;
    double gamma_over_sigma = 0.0;
    double Gamma_over_sigma = 0.0;
    double lambda_p = 5e-5;
    double eta = 0.5;
    std::size_t points = 401;
    double half_width = 6.0;
    std::string out_prefix;
};

json diagnose_params_to_json(const DiagnoseParams& p) {
    return json{{"rho", p.rho},
                {"gamma_over_sigma", p.gamma_over_sigma},
                {"Gamma_over_sigma", p.Gamma_over_sigma},
                {"lambda_p", p.lambda_p},
                {"eta", p.eta},
                {"points", p.points},
                {"half_width", p.half_width},
                {"out", p.out_prefix}};
}

DiagnoseParams diagnose_params_from_json(const json& j) {
    DiagnoseParams p;
    p.rho = j.at("rho");
    p.gamma_over_sigma = j.at("gamma_over_sigma");
    p.Gamma_over_sigma = j.at("Gamma_over_sigma");
    p.lambda_p = j.at("lambda_p");
    p.eta = j.at("eta");
    p.points = j.at("points");
    p.half_width = j.at("half_width");
    p.out_prefix = j.at("out");
    return p;
}

int run_diagnose(const DiagnoseParams& p) {
    double lambda = norm_quantile(1.0 - p.lambda_p / 2.0);
    Lemma1Params params;
    params.rho = p.rho;
    params.gamma_over_sigma = p.gamma_over_sigma;
    params.Gamma_over_sigma = p.Gamma_over_sigma;
    params.lambda = lambda;
    params.eta = p.eta;
    params.validate();

    char buf[40];
    auto f17 = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };

    std::ostringstream density;
    density << "x,density\n";
    for (std::size_t i = 0; i < p.points; ++i) {
        double x = p.Gamma_over_sigma - p.half_width +
                   2.0 * p.half_width * static_cast<double>(i) /
                       static_cast<double>(p.points - 1);
        density << f17(x) << ',' << f17(conditional_density(x, params)) << '\n';
    }
    write_file(p.out_prefix + "_density.csv", density.str());

    // post-selection bias of the outcome association across instrument
    // strengths, standardized units
    std::ostringstream bias;
    bias << "gamma_over_sigma,bias\n";
    for (std::size_t i = 0; i < p.points; ++i) {
        Lemma1Params q = params;
        q.gamma_over_sigma =
            2.2 * lambda * static_cast<double>(i) / static_cast<double>(p.points - 1);
        bias << f17(q.gamma_over_sigma) << ','
             << f17(conditional_mean(q) - q.Gamma_over_sigma) << '\n';
    }
    write_file(p.out_prefix + "_bias.csv", bias.str());

    write_manifest(p.out_prefix + ".manifest.json", "diagnose",
                   diagnose_params_to_json(p));
    std::cout << "diagnose -> " << p.out_prefix << "_density.csv, " << p.out_prefix
              << "_bias.csv\n";
    return 0;
}

// ---------------------------------------------------------------------------
// prune

struct PruneParams {
    std::string pairs_path;
    std::string ld_path;
    double r2_max = 0.001;
    std::int64_t window_kb = 10000;
    std::string out_path;
};

json prune_params_to_json(const PruneParams& p) {
    return json{{"pairs", p.pairs_path},
                {"ld", p.ld_path},
                {"r2_max", p.r2_max},
                {"window_kb", p.window_kb},
                {"out", p.out_path}};
}

PruneParams prune_params_from_json(const json& j) {
    PruneParams p;
    p.pairs_path = j.at("pairs");
    p.ld_path = j.value("ld", "");
    p.r2_max = j.at("r2_max");
    p.window_kb = j.at("window_kb");
    p.out_path = j.at("out");
    return p;
}

int run_prune(const PruneParams& p) {
    std::ifstream pairs_in(p.pairs_path);
    if (!pairs_in) throw std::runtime_error("cannot open '" + p.pairs_path + "'");
    std::vector<SnpPair> pairs = read_pairs_tsv(pairs_in);
    std::vector<LdPair> ld;
    if (!p.ld_path.empty()) {
        std::ifstream ld_in(p.ld_path);
        if (!ld_in) throw std::runtime_error("cannot open '" + p.ld_path + "'");
        ld = read_ld_tsv(ld_in);
    }
    std::vector<SnpPair> kept = sigma_prune(pairs, ld, p.r2_max, p.window_kb);
    std::ostringstream out;
    write_pairs_tsv(out, kept);
    write_file(p.out_path, out.str());
    write_manifest(p.out_path + ".manifest.json", "prune", prune_params_to_json(p));
    std::cout << "prune: kept " << kept.size() << " of " << pairs.size() << " SNPs -> "
              << p.out_path << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// rerun

int run_from_manifest(const std::string& path) {
    json manifest = json::parse(read_file(path));
    std::string command = manifest.at("command");
    const json& params = manifest.at("parameters");
    if (command == "estimate") return run_estimate(estimate_params_from_json(params));
    if (command == "simulate") {
        SimulateParams p;
        p.config_text = params.at("config");
        p.out_prefix = params.at("out");
        p.workers = params.value("workers", 0);
        return run_simulate(p);
    }
    if (command == "diagnose") return run_diagnose(diagnose_params_from_json(params));
    if (command == "prune") return run_prune(prune_params_from_json(params));
    throw std::invalid_argument("manifest has unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-sample summary-data Mendelian randomization with winner's curse and "
                 "sample-structure correction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // estimate
    EstimateParams ep;
    ep.seed = default_seed();
    CLI::App* est = app.add_subcommand("estimate", "run the estimation pipeline on GWAS "
                                                   "summary files");
    est->add_option("--exposure", ep.exposure_path, "exposure summary TSV")->required();
    est->add_option("--outcome", ep.outcome_path, "outcome summary TSV")->required();
    est->add_option("--ld", ep.ld_path, "LD pair TSV (snp_a, snp_b, r2)");
    est->add_option("--column-map", ep.column_map_path, "key=value column-name mapping");
    est->add_option("--structure-file", ep.structure_file,
                    "key=value file with c1/c2/c12 (explicit flags win)");
    auto* c1_opt = est->add_option("--c1", ep.c1, "exposure SE inflation intercept");
    auto* c2_opt = est->add_option("--c2", ep.c2, "outcome SE inflation intercept");
    auto* c12_opt = est->add_option("--c12", ep.c12, "cross-trait intercept");
    est->add_option("--inflation-scale", ep.inflation_scale,
                    "how c1/c2 scale the SEs: sd or var")
        ->check(CLI::IsMember({"sd", "var"}));
    est->add_option("--lambda-p", ep.lambda_p,
                    "selection p-value threshold (lambda = Phi^-1(1-p/2))");
    est->add_option("--eta", ep.eta, "pseudo-noise scale");
    est->add_option("--seed", ep.seed, "selection noise seed (env BRIVW_SEED)");
    est->add_option("--alpha", ep.alpha, "CI significance level");
    est->add_option("--methods", ep.methods, "comma list of ivw,divw,rivw,brivw");
    est->add_flag("--prune", ep.prune, "apply sigma-based pruning before estimation");
    est->add_option("--r2-max", ep.r2_max, "pruning r2 threshold");
    est->add_option("--window-kb", ep.window_kb, "pruning window in kb");
    est->add_option("--out", ep.out_prefix, "output prefix")->required();
    est->add_option("--audit", ep.audit_path, "per-SNP Rao-Blackwell audit TSV");

    // simulate
    std::string sim_config_path;
    SimulateParams sp;
    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo sweeps over a config grid");
    sim->add_option("--config", sim_config_path, "key=value grid config file")->required();
    sim->add_option("--out", sp.out_prefix, "output prefix")->required();
    sim->add_option("--workers", sp.workers, "worker threads (0 = all cores)");

    // diagnose
    DiagnoseParams dp;
    CLI::App* diag = app.add_subcommand("diagnose", "post-selection density and bias curves");
    diag->add_option("--rho", dp.rho, "error correlation");
    diag->add_option("--gamma-over-sigma", dp.gamma_over_sigma, "true exposure t-score");
    diag->add_option("--Gamma-over-sigma", dp.Gamma_over_sigma, "true outcome t-score");
    diag->add_option("--lambda-p", dp.lambda_p, "selection p-value threshold");
    diag->add_option("--eta", dp.eta, "pseudo-noise scale");
    diag->add_option("--points", dp.points, "grid points per curve");
    diag->add_option("--half-width", dp.half_width, "density grid half-width");
    diag->add_option("--out", dp.out_prefix, "output prefix")->required();

    // prune
    PruneParams pp;
    CLI::App* prune = app.add_subcommand("prune", "standalone sigma-based pruning");
    prune->add_option("--pairs", pp.pairs_path, "harmonized SnpPair TSV")->required();
    prune->add_option("--ld", pp.ld_path, "LD pair TSV");
    prune->add_option("--r2-max", pp.r2_max, "r2 threshold");
    prune->add_option("--window-kb", pp.window_kb, "window in kb");
    prune->add_option("--out", pp.out_path, "output TSV")->required();

    // rerun
    std::string manifest_path;
    CLI::App* rerun = app.add_subcommand("rerun", "re-execute a run from its manifest");
    rerun->add_option("manifest", manifest_path, "manifest JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (est->parsed()) {
            ep.c12_given = c12_opt->count() > 0;
            if (!ep.structure_file.empty()) {
                auto kv = parse_kv(read_file(ep.structure_file));
                auto take = [&](const char* key, double& slot, CLI::Option* opt,
                                bool* given = nullptr) {
                    auto it = kv.find(key);
                    if (it != kv.end() && opt->count() == 0) {
                        slot = std::stod(it->second);
                        if (given) *given = true;
                    }
                };
                take("c1", ep.c1, c1_opt);
                take("c2", ep.c2, c2_opt);
                take("c12", ep.c12, c12_opt, &ep.c12_given);
            }
            return run_estimate(ep);
        }
        if (sim->parsed()) {
            sp.config_text = read_file(sim_config_path);
            return run_simulate(sp);
        }
        if (diag->parsed()) return run_diagnose(dp);
        if (prune->parsed()) return run_prune(pp);
        if (rerun->parsed()) return run_from_manifest(manifest_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
