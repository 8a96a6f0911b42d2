#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "dslab/rational.hpp"

namespace dslab {

// A two-sided enclosure lo <= x <= hi of a real; both bounds are exact
// dyadic rationals obtained from directed MPFR rounding. All interval
// combinations (products, quotients) are done in exact rational
// arithmetic on the bounds, so no rounding step can silently flip an
// inequality.
struct RealBounds {
    Rat lo;
    Rat hi;

    Rat mid() const { return (lo + hi) / 2; }
    Rat radius() const { return (hi - lo) / 2; }
};

// Decimal rendering of an enclosure midpoint. Reports only; comparisons
// never go through text.
std::string bounds_to_decimal(const RealBounds& b, int digits = 24);
std::string rat_to_decimal(const Rat& q, int digits = 24);

// Certified enclosure of ln q for rational q > 0.
RealBounds ln_bounds(const Rat& q, long prec = 128);

// Directed exp of an exact rational exponent.
Rat exp_dir_lo(const Rat& t, long prec = 128);
Rat exp_dir_hi(const Rat& t, long prec = 128);

// floor(ln q) for rational q > 0, certified by interval refinement.
// ln q is irrational for every rational q != 1, so refinement terminates;
// q = 1 is the single exact boundary and returns 0 (the inclusive rule
// e^j <= q at j = 0).
long floor_ln(const Rat& q);

// Enclosure of R = ln(ln X) for an integer X >= 3.
RealBounds log_log_bounds(std::uint64_t X, long prec = 128);

// Enclosure of c * R * ln R with R = ln ln X; requires X >= 3 and c > 0.
RealBounds c_R_logR_bounds(const Rat& c, std::uint64_t X, long prec = 128);

// Certified floor of c * R * ln R, by precision escalation.
Int floor_c_R_logR(const Rat& c, std::uint64_t X);

// Certified floor of R = ln ln X.
long floor_R(std::uint64_t X);

// Exact dyadic upper bound on (1 + ln D) / R for rational D >= 1, X >= 3,
// computed at fixed precision. Deterministic for fixed (D, X, prec).
Rat upper_one_plus_lnD_over_R(const Rat& D, std::uint64_t X, long prec = 128);

// floor(e^{-k} * 2^96) / 2^96: the rounded-down 96-fractional-bit dyadic
// approximation of e^{-k} used by paper-mode rescaling. k >= 1.
Rat dyadic_exp_neg(long k);

// Enclosure of -ln(q) for rational q in (0, 1].
RealBounds neg_ln_bounds(const Rat& q, long prec = 192);

// Enclosure of the extra-divergence damping denominator
// exp(c * (ln ln n)(ln ln ln n)) for n >= 16, c > 0.
RealBounds extra_damping_bounds(const Rat& c, std::uint64_t n, long prec = 128);

// True iff q < e^{-e}, certified (q rational, so the comparison resolves).
bool below_exp_neg_e(const Rat& q);

// Enclosure of x * exp(-c * ln(-ln x) * ln(ln(-ln x))) for rational x
// with 0 < x < e^{-e}.
RealBounds fc_core_bounds(const Rat& x, const Rat& c, long prec = 128);

// Enclosure of x * exp(ln x / ln(-ln x)) for rational x in (0,1). Throws
// domain_error when the enclosure of ln(-ln x) straddles 0 (x too close
// to 1/e to certify at this precision).
RealBounds hpv_core_bounds(const Rat& x, long prec = 128);

// Sum accumulator for long enclosure series. Each added term is rounded
// outward onto the grid of multiples of 2^-frac_bits, so the running lower
// and upper totals are plain integer sums: exact, associative, and cheap
// no matter how many terms arrive.
class DyadicSum {
  public:
    explicit DyadicSum(long frac_bits = 192);

    void add(const RealBounds& b);
    void add_exact(const Rat& q);

    RealBounds value() const;
    std::uint64_t terms() const { return terms_; }

  private:
    long frac_bits_;
    Int lo_ = 0;
    Int hi_ = 0;
    std::uint64_t terms_ = 0;
};

} // namespace dslab
