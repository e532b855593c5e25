#include "brivw/gwas.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace brivw {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
        fields.back().pop_back();
    }
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_int(const std::string& s, std::int64_t& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

bool valid_allele(char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'T'; }

bool parse_allele(const std::string& s, char& out) {
    if (s.size() != 1) return false;
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    if (!valid_allele(c)) return false;
    out = c;
    return true;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool is_palindromic(char a, char b) {
    return (a == 'A' && b == 'T') || (a == 'T' && b == 'A') || (a == 'C' && b == 'G') ||
           (a == 'G' && b == 'C');
}

}  // namespace

ColumnMap ColumnMap::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open column map file '" + path + "'");
    ColumnMap map;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("column map '" + path + "' line " +
                                     std::to_string(lineno) + ": expected key=value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (!value.empty() && value.back() == '\r') value.pop_back();
        if (key == "snp") map.snp = value;
        else if (key == "chrom") map.chrom = value;
        else if (key == "pos") map.pos = value;
        else if (key == "effect_allele") map.effect_allele = value;
        else if (key == "other_allele") map.other_allele = value;
        else if (key == "beta") map.beta = value;
        else if (key == "se") map.se = value;
        else if (key == "sample_n") map.sample_n = value;
        else {
            throw std::runtime_error("column map '" + path + "': unknown key '" + key + "'");
        }
    }
    return map;
}

ParseResult parse_gwas(std::istream& in, const ColumnMap& map) {
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("parse_gwas: empty input, header line required");
    }
    std::vector<std::string> names = split_tabs(header);
    auto column = [&](const std::string& name) -> int {
        auto it = std::find(names.begin(), names.end(), name);
        return it == names.end() ? -1 : static_cast<int>(it - names.begin());
    };

    const int c_snp = column(map.snp);
    const int c_chr = column(map.chrom);
    const int c_pos = column(map.pos);
    const int c_ea = column(map.effect_allele);
    const int c_oa = column(map.other_allele);
    const int c_beta = column(map.beta);
    const int c_se = column(map.se);
    const int c_n = column(map.sample_n);

    auto require = [&](int idx, const std::string& name) {
        if (idx < 0) {
            throw std::runtime_error("parse_gwas: mandatory column '" + name + "' missing");
        }
    };
    require(c_snp, map.snp);
    require(c_chr, map.chrom);
    require(c_pos, map.pos);
    require(c_ea, map.effect_allele);
    require(c_oa, map.other_allele);
    require(c_beta, map.beta);
    require(c_se, map.se);

    const std::size_t min_fields = names.size();
    ParseResult out;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f = split_tabs(line);
        auto reject = [&](const std::string& reason) {
            out.rejected.push_back({lineno, reason});
        };
        if (f.size() < min_fields) {
            reject("expected " + std::to_string(min_fields) + " fields, got " +
                   std::to_string(f.size()));
            continue;
        }
        GwasRow row;
        row.snp_id = f[c_snp];
        row.chrom = f[c_chr];
        if (row.snp_id.empty()) {
            reject("empty SNP id");
            continue;
        }
        if (!parse_int(f[c_pos], row.pos) || row.pos < 0) {
            reject("invalid position '" + f[c_pos] + "'");
            continue;
        }
        if (!parse_allele(f[c_ea], row.effect_allele) ||
            !parse_allele(f[c_oa], row.other_allele)) {
            reject("invalid allele pair '" + f[c_ea] + "/" + f[c_oa] + "'");
            continue;
        }
        if (row.effect_allele == row.other_allele) {
            reject("identical effect and other allele");
            continue;
        }
        if (!parse_double(f[c_beta], row.beta)) {
            reject("invalid beta '" + f[c_beta] + "'");
            continue;
        }
        if (!parse_double(f[c_se], row.se)) {
            reject("invalid SE '" + f[c_se] + "'");
            continue;
        }
        if (!(row.se > 0.0)) {
            reject("non-positive SE");
            continue;
        }
        if (c_n >= 0 && f[c_n] != "NA" && !f[c_n].empty()) {
            std::int64_t n;
            if (!parse_int(f[c_n], n) || n < 0) {
                reject("invalid sample size '" + f[c_n] + "'");
                continue;
            }
            row.sample_n = static_cast<std::uint64_t>(n);
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

void emit_gwas(std::ostream& out, const std::vector<GwasRow>& rows, const ColumnMap& map) {
    out << map.snp << '\t' << map.chrom << '\t' << map.pos << '\t' << map.effect_allele
        << '\t' << map.other_allele << '\t' << map.beta << '\t' << map.se << '\t'
        << map.sample_n << '\n';
    for (const GwasRow& r : rows) {
        out << r.snp_id << '\t' << r.chrom << '\t' << r.pos << '\t' << r.effect_allele << '\t'
            << r.other_allele << '\t' << fmt17(r.beta) << '\t' << fmt17(r.se) << '\t';
        if (r.sample_n) {
            out << *r.sample_n;
        } else {
            out << "NA";
        }
        out << '\n';
    }
}

HarmonizeResult harmonize(const std::vector<GwasRow>& exposure,
                          const std::vector<GwasRow>& outcome) {
    std::unordered_map<std::string, std::size_t> outcome_index;
    outcome_index.reserve(outcome.size());
    HarmonizeResult out;
    for (std::size_t i = 0; i < outcome.size(); ++i) {
        if (!outcome_index.emplace(outcome[i].snp_id, i).second) {
            ++out.counts.dropped_duplicate;
        }
    }

    std::unordered_map<std::string, bool> seen_exposure;
    seen_exposure.reserve(exposure.size());
    std::size_t matched_outcome = 0;
    for (const GwasRow& ex : exposure) {
        if (!seen_exposure.emplace(ex.snp_id, true).second) {
            ++out.counts.dropped_duplicate;
            continue;
        }
        auto it = outcome_index.find(ex.snp_id);
        if (it == outcome_index.end()) {
            ++out.counts.exposure_only;
            continue;
        }
        ++matched_outcome;
        const GwasRow& oc = outcome[it->second];
        if (is_palindromic(ex.effect_allele, ex.other_allele)) {
            ++out.counts.dropped_palindromic;
            continue;
        }
        double outcome_beta;
        if (oc.effect_allele == ex.effect_allele && oc.other_allele == ex.other_allele) {
            outcome_beta = oc.beta;
            ++out.counts.aligned;
        } else if (oc.effect_allele == ex.other_allele && oc.other_allele == ex.effect_allele) {
            outcome_beta = -oc.beta;
            ++out.counts.flipped;
        } else {
            ++out.counts.dropped_mismatch;
            continue;
        }
        SnpPair pair;
        pair.id = ex.snp_id;
        pair.chrom = ex.chrom;
        pair.pos = ex.pos;
        pair.gamma_hat = ex.beta;
        pair.se_gamma_raw = ex.se;
        pair.Gamma_hat = outcome_beta;
        pair.se_Gamma_raw = oc.se;
        out.pairs.push_back(std::move(pair));
    }
    out.counts.outcome_only = outcome_index.size() - matched_outcome;

    if (matched_outcome == 0) {
        throw std::runtime_error(
            "harmonize: no overlapping SNP ids between exposure and outcome (" +
            std::to_string(exposure.size()) + " vs " + std::to_string(outcome.size()) +
            " rows)");
    }
    return out;
}

std::vector<SnpPair> sigma_prune(const std::vector<SnpPair>& pairs,
                                 const std::vector<LdPair>& ld, double r2_max,
                                 std::int64_t window_kb) {
    if (!(r2_max >= 0.0)) throw std::invalid_argument("sigma_prune: r2_max must be >= 0");
    if (window_kb < 0) throw std::invalid_argument("sigma_prune: window_kb must be >= 0");
    for (const SnpPair& p : pairs) {
        if (p.pos < 0 || p.chrom.empty()) {
            throw std::invalid_argument("sigma_prune: SNP '" + p.id +
                                        "' lacks a chromosome/position");
        }
    }

    std::unordered_map<std::string, double> r2_of;
    r2_of.reserve(ld.size());
    for (const LdPair& e : ld) {
        if (!(e.r2 >= 0.0) || !(e.r2 <= 1.0)) {
            throw std::invalid_argument("sigma_prune: r2 must lie in [0,1]");
        }
        const std::string& lo = std::min(e.snp_a, e.snp_b);
        const std::string& hi = std::max(e.snp_a, e.snp_b);
        r2_of[lo + '\t' + hi] = e.r2;
    }
    auto lookup_r2 = [&](const std::string& a, const std::string& b) {
        const std::string& lo = std::min(a, b);
        const std::string& hi = std::max(a, b);
        auto it = r2_of.find(lo + '\t' + hi);
        return it == r2_of.end() ? 0.0 : it->second;  // absent pair = independent
    };

    // Greedy acceptance by ascending exposure SE, ties by id.
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pairs[a].se_gamma_raw != pairs[b].se_gamma_raw) {
            return pairs[a].se_gamma_raw < pairs[b].se_gamma_raw;
        }
        return pairs[a].id < pairs[b].id;
    });

    const std::int64_t window_bp = window_kb * 1000;
    // accepted SNPs per chromosome, sorted by position
    std::unordered_map<std::string, std::vector<std::pair<std::int64_t, std::size_t>>> kept;
    std::vector<bool> keep(pairs.size(), false);

    for (std::size_t idx : order) {
        const SnpPair& cand = pairs[idx];
        auto& on_chrom = kept[cand.chrom];
        auto lo = std::lower_bound(on_chrom.begin(), on_chrom.end(),
                                   std::make_pair(cand.pos - window_bp, std::size_t{0}));
        bool blocked = false;
        for (auto it = lo; it != on_chrom.end() && it->first <= cand.pos + window_bp; ++it) {
            if (lookup_r2(cand.id, pairs[it->second].id) >= r2_max) {
                blocked = true;
                break;
            }
        }
        if (blocked) continue;
        keep[idx] = true;
        on_chrom.insert(std::upper_bound(on_chrom.begin(), on_chrom.end(),
                                         std::make_pair(cand.pos, idx)),
                        {cand.pos, idx});
    }

    std::vector<SnpPair> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (keep[i]) out.push_back(pairs[i]);
    }
    return out;
}

void write_pairs_tsv(std::ostream& out, const std::vector<SnpPair>& pairs) {
    out << "id\tchrom\tpos\tgamma_hat\tse_gamma\tGamma_hat\tse_Gamma\n";
    for (const SnpPair& p : pairs) {
        out << p.id << '\t' << p.chrom << '\t' << p.pos << '\t' << fmt17(p.gamma_hat) << '\t'
            << fmt17(p.se_gamma_raw) << '\t' << fmt17(p.Gamma_hat) << '\t'
            << fmt17(p.se_Gamma_raw) << '\n';
    }
}

std::vector<SnpPair> read_pairs_tsv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("read_pairs_tsv: empty input");
    }
    if (split_tabs(header) !=
        std::vector<std::string>{"id", "chrom", "pos", "gamma_hat", "se_gamma", "Gamma_hat",
                                 "se_Gamma"}) {
        throw std::runtime_error("read_pairs_tsv: unexpected header '" + header + "'");
    }
    std::vector<SnpPair> pairs;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f = split_tabs(line);
        if (f.size() != 7) {
            throw std::runtime_error("read_pairs_tsv: line " + std::to_string(lineno) +
                                     ": expected 7 fields");
        }
        SnpPair p;
        p.id = f[0];
        p.chrom = f[1];
        bool ok = parse_int(f[2], p.pos) && parse_double(f[3], p.gamma_hat) &&
                  parse_double(f[4], p.se_gamma_raw) && parse_double(f[5], p.Gamma_hat) &&
                  parse_double(f[6], p.se_Gamma_raw);
        if (!ok) {
            throw std::runtime_error("read_pairs_tsv: line " + std::to_string(lineno) +
                                     ": malformed numeric field");
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

std::vector<LdPair> read_ld_tsv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("read_ld_tsv: empty input");
    }
    std::vector<LdPair> ld;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f = split_tabs(line);
        if (f.size() != 3) {
            throw std::runtime_error("read_ld_tsv: line " + std::to_string(lineno) +
                                     ": expected snp_a, snp_b, r2");
        }
        LdPair e;
        e.snp_a = f[0];
        e.snp_b = f[1];
        if (!parse_double(f[2], e.r2)) {
            throw std::runtime_error("read_ld_tsv: line " + std::to_string(lineno) +
                                     ": invalid r2 '" + f[2] + "'");
        }
        ld.push_back(std::move(e));
    }
    return ld;
}

}  // namespace brivw
