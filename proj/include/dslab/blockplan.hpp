#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dslab/blocks.hpp"
#include "dslab/certified.hpp"
#include "dslab/psifun.hpp"

namespace dslab {

// One block [X, X_next) of the tower, optionally truncated by a cap, with
// the derived selection parameters: R = ln ln X, K = max(1, floor(c R ln R)),
// and the exact double sum Psi_X over ordered pairs m != n of
// psi(m) psi(n) phi(m) phi(n) / (m n).
struct BlockContext {
    unsigned h = 0;
    std::uint64_t block_lo = 0; // X
    std::uint64_t block_hi = 0; // one past the last member after the cap
    std::uint64_t full_hi = 0;  // X_next, ignoring the cap
    RealBounds R;
    long R_floor = 0;
    long K = 1;
    Rat c;
    Rat Psi_X;
};

BlockContext make_block_context(unsigned h, const PsiFunction& psi,
                                std::optional<std::uint64_t> cap = {});

// T_j sums and pair counts over the buckets e^j <= D(m,n) < e^{j+1};
// ordered pairs, so each unordered pair contributes twice.
struct BucketTable {
    std::map<long, Rat> t_sums;
    std::map<long, std::uint64_t> pair_counts;
    Rat total; // sum of every T_j; equals Psi_X when nothing was skipped
};

BucketTable bucketize(const BlockContext& ctx, const PsiFunction& psi,
                      std::uint64_t pair_budget = 50'000'000, unsigned workers = 1);

enum class ScaleMode { dyadic, paper };

// The selection S(k) carries the common positive factor R in every term;
// the stored values are S(k)/R, which keeps them exact rationals while
// preserving the argmin and the pigeonhole comparison.
struct RescalePlan {
    BlockContext ctx;
    std::map<long, Rat> s_scaled; // k -> S(k)/R for 1 <= k <= K
    long k_star = 1;
    ScaleMode mode = ScaleMode::dyadic;
    Rat scale;                    // stand-in for e^{-k_star}
    PsiFunction rho = PsiFunction::from_table({}, Rat(1));
};

RescalePlan select_k(const BlockContext& ctx, const BucketTable& table);

// Fills in scale and rho: psi restricted to the block and multiplied by
// 2^{-k_star} (dyadic mode) or the 96-bit rounded-down dyadic image of
// e^{-k_star} (paper mode). Returns rho.
PsiFunction rescale(RescalePlan& plan, const PsiFunction& psi, ScaleMode mode = ScaleMode::dyadic);

// Certified check of -ln(scale) <= max(1, c R ln R) + eps.
bool scale_bound_holds(const RescalePlan& plan, const Rat& eps = Rat(1, 1'000'000));

std::string serialize_plan(const RescalePlan& plan);

struct CrossBlockReport {
    Rat max_P;
    std::uint64_t argmax_m = 0;
    std::uint64_t argmax_n = 0;
    std::uint64_t pairs_scanned = 0;
    std::vector<std::string> warnings; // normalization violations found up front
};

// Max of P over pairs from [m_min, m_max] x [n_min, n_max] whose block
// indices differ (same-block pairs and pairs with a vanishing psi value
// are skipped). Ties resolve to the smallest (m, n).
CrossBlockReport cross_block_P_scan(const PsiFunction& psi, std::uint64_t m_min,
                                    std::uint64_t m_max, std::uint64_t n_min, std::uint64_t n_max,
                                    std::uint64_t pair_budget = 50'000'000, unsigned workers = 1);

struct MertensReport {
    Rat max_value; // max of P(m,n) * upper((1 + ln D)/R) over pairs with D >= 1
    std::uint64_t argmax_m = 0;
    std::uint64_t argmax_n = 0;
    std::uint64_t pairs_with_d_ge_1 = 0;
    std::uint64_t pairs_scanned = 0;
};

MertensReport mertens_ratio_scan(const BlockContext& ctx, const PsiFunction& psi,
                                 std::uint64_t pair_budget = 50'000'000, unsigned workers = 1);

// Which bucket index decides membership in the exceptional window
// [k_star, k_star + floor(R)]: the bucket of D under psi (default) or the
// bucket recomputed under rho.
enum class ExceptionalRule { psi_window, rho_buckets };

struct QuasiIndependenceReport {
    std::uint64_t regular_pairs = 0;     // unordered
    std::uint64_t exceptional_pairs = 0; // unordered
    Rat max_regular_ratio;               // lambda(inter)/(lambda lambda) over regular pairs
    std::uint64_t argmax_m = 0;
    std::uint64_t argmax_n = 0;
    Rat exceptional_mass; // ordered sum of rho rho phi phi/(mn) * P_rho over exceptional pairs
    Rat block_mass;       // ordered sum of rho rho phi phi/(mn) over all pairs m != n
    Rat mass_ratio;       // exceptional_mass / block_mass, 0 when block_mass is 0
};

QuasiIndependenceReport quasi_independence_check(const BlockContext& ctx, const RescalePlan& plan,
                                                 const PsiFunction& psi,
                                                 ExceptionalRule rule = ExceptionalRule::psi_window,
                                                 std::uint64_t pair_budget = 50'000'000,
                                                 unsigned workers = 1);

} // namespace dslab
