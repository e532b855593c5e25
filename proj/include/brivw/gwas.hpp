#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "brivw/structure.hpp"

namespace brivw {

/// One parsed GWAS summary-statistics row.
struct GwasRow {
    std::string snp_id;
    std::string chrom;
    std::int64_t pos = 0;
    char effect_allele = 'A';
    char other_allele = 'C';
    double beta = 0.0;
    double se = 0.0;
    std::optional<std::uint64_t> sample_n;

    bool operator==(const GwasRow&) const = default;
};

/// Pairwise LD entry; the relation is symmetric.
struct LdPair {
    std::string snp_a;
    std::string snp_b;
    double r2 = 0.0;
};

/// Header-name mapping for parse/emit. Defaults follow the common
/// SNP/CHR/POS/A1/A2/BETA/SE/N layout.
struct ColumnMap {
    std::string snp = "SNP";
    std::string chrom = "CHR";
    std::string pos = "POS";
    std::string effect_allele = "A1";
    std::string other_allele = "A2";
    std::string beta = "BETA";
    std::string se = "SE";
    std::string sample_n = "N";

    /// key=value file, keys snp/chrom/pos/effect_allele/other_allele/beta/se/sample_n.
    static ColumnMap from_file(const std::string& path);
};

struct ParseReject {
    std::size_t line;  // 1-based line number in the input
    std::string reason;
};

struct ParseResult {
    std::vector<GwasRow> rows;
    std::vector<ParseReject> rejected;
};

/// Parses a tab-separated table with a header line. Missing mandatory
/// columns are fatal (std::runtime_error); malformed rows are skipped and
/// reported. The N column is optional ("NA" or absent).
ParseResult parse_gwas(std::istream& in, const ColumnMap& map = {});

/// Writes rows in the parse_gwas layout; parse(emit(rows)) round-trips
/// exactly (doubles are serialized with 17 significant digits).
void emit_gwas(std::ostream& out, const std::vector<GwasRow>& rows, const ColumnMap& map = {});

struct HarmonizeCounts {
    std::size_t aligned = 0;
    std::size_t flipped = 0;
    std::size_t dropped_palindromic = 0;
    std::size_t dropped_mismatch = 0;
    std::size_t dropped_duplicate = 0;
    std::size_t exposure_only = 0;
    std::size_t outcome_only = 0;
};

struct HarmonizeResult {
    std::vector<SnpPair> pairs;  // raw fields only; chrom/pos from the exposure side
    HarmonizeCounts counts;
};

/// Inner-join on snp_id with effect-allele alignment: swapped outcome
/// alleles flip the outcome beta, palindromic (A/T, C/G) SNPs and allele
/// mismatches are dropped. Throws std::runtime_error when no SNPs overlap.
HarmonizeResult harmonize(const std::vector<GwasRow>& exposure,
                          const std::vector<GwasRow>& outcome);

/// Greedy sigma-based pruning: visit SNPs by ascending se_gamma_raw (ties
/// by id), keep a SNP unless an already-kept SNP on the same chromosome
/// within window_kb has r2 >= r2_max with it. SNP pairs absent from `ld`
/// are treated as independent. Output preserves input order.
std::vector<SnpPair> sigma_prune(const std::vector<SnpPair>& pairs,
                                 const std::vector<LdPair>& ld, double r2_max = 0.001,
                                 std::int64_t window_kb = 10000);

/// SnpPair table (raw fields) used by the CLI between pipeline stages.
void write_pairs_tsv(std::ostream& out, const std::vector<SnpPair>& pairs);
std::vector<SnpPair> read_pairs_tsv(std::istream& in);

/// LD table: snp_a, snp_b, r2 with a header line.
std::vector<LdPair> read_ld_tsv(std::istream& in);

}  // namespace brivw
