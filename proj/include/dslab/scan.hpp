#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dslab/blockplan.hpp"
#include "dslab/overlap.hpp"
#include "dslab/psifun.hpp"
#include "dslab/rational.hpp"

namespace dslab {

enum class PairFilter { all, cross_block, within_block, sampled };

// Pair-scan request. The range comes either from an explicit inclusive
// [min, max] or from tower block h (optionally truncated by cap); exactly
// one selector must be present. Sampling draws unordered pairs uniformly
// and is reproducible from (seed, sample_count, range).
struct ScanSpec {
    std::optional<std::uint64_t> min;
    std::optional<std::uint64_t> max;
    std::optional<unsigned> h;
    std::optional<std::uint64_t> cap;
    PairFilter filter = PairFilter::all;
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;
    std::string psi_path;          // used by the path-loading overload
    std::optional<Rat> c_override; // applied by the path-loading overload
    std::uint64_t pair_budget = 1'000'000;
    std::uint64_t arc_budget = 10'000'000;
    unsigned workers = 1;
};

struct ScanSummary {
    std::uint64_t pairs = 0;
    Rat sum_inter;   // sum of lambda(E_m cap E_n) over emitted pairs
    Rat sum_product; // sum of lambda(E_m) lambda(E_n)
    // Pairs whose threshold satisfies 1 <= A/gcd < ln(mn): the range where
    // the prime product P has too few factors to average well. The mass is
    // their share of sum_product.
    std::uint64_t trouble_pairs = 0;
    Rat trouble_mass;
    Rat max_ratio; // max lambda_inter/(lambda_m lambda_n P), ties to smallest (m, n)
    std::uint64_t argmax_m = 0;
    std::uint64_t argmax_n = 0;
};

struct ScanResult {
    std::vector<PairStats> rows; // sorted by (m, n)
    ScanSummary summary;
};

ScanResult run_scan(const ScanSpec& spec, const PsiFunction& psi);
ScanResult run_scan(const ScanSpec& spec); // loads psi_path, applies c_override

std::string rows_to_csv(const std::vector<PairStats>& rows);
std::string result_to_json(const ScanResult& result);

// Empirical constants pinned by an oracle run. Every value is an exact
// rational and regenerates bit-identically from the fixed specs embedded
// in the JSON form.
struct GoldenRecord {
    Rat max_pair_ratio;         // scan 16 <= m < n <= 255, psi = 1/n
    Rat max_cross_block_p;      // cross-block pairs, m <= 255 < 256 <= n <= 4095, psi = 1/n
    Rat max_mertens_ratio;      // block h=1, psi = 1/n
    Rat exceptional_mass_ratio; // block h=1, psi = 1/n, dyadic rescale
};

GoldenRecord compute_golden_record(unsigned workers = 1);
std::string golden_to_json(const GoldenRecord& rec);
GoldenRecord parse_golden(const std::string& text);
GoldenRecord load_golden_file(const std::string& path);

struct GoldenDiff {
    std::string name;
    Rat stored;
    Rat fresh;
};

std::vector<GoldenDiff> diff_golden(const GoldenRecord& stored, const GoldenRecord& fresh);

} // namespace dslab
