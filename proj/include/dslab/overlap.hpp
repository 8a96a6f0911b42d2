#pragma once

#include <cstdint>

#include "dslab/approxsets.hpp"
#include "dslab/psifun.hpp"

namespace dslab {

// Everything the scan engine records about one unordered pair m != n. All
// fields are exact; ratio is 0 whenever indep_rhs is 0.
struct PairStats {
    std::uint64_t m = 0;
    std::uint64_t n = 0;
    Rat lambda_m;
    Rat lambda_n;
    Rat lambda_inter;
    Rat A;          // 2 max(m psi(n), n psi(m))
    Rat D;          // max(n psi(m), m psi(n)) / gcd(m,n)
    Rat P;          // prod over primes p | mn/gcd^2 with p > D of p/(p-1)
    std::uint64_t sigma = 0;
    Rat indep_rhs;  // lambda_m * lambda_n * P
    Rat ratio;      // lambda_inter / indep_rhs
};

enum class SigmaMethod { brute, fast };

Rat quantity_A(std::uint64_t m, std::uint64_t n, const PsiFunction& psi);
Rat quantity_D(std::uint64_t m, std::uint64_t n, const PsiFunction& psi);
Rat factor_P(std::uint64_t m, std::uint64_t n, const PsiFunction& psi);

// Number of (a, b) with 1 <= a < m, 1 <= b < n, gcd(a,m) = gcd(b,n) = 1 and
// |a n - b m| strictly below A(m,n). brute is the double loop; fast walks
// the multiples h of gcd(m,n) in (-A, A), parametrizes the solution line of
// a n - b m = h, and counts coprime points by inclusion-exclusion over the
// prime divisors of m and n.
std::uint64_t count_sigma(std::uint64_t m, std::uint64_t n, const PsiFunction& psi,
                          SigmaMethod method);

PairStats pair_stats(std::uint64_t m, std::uint64_t n, const PsiFunction& psi);

// Variant for scan loops that already hold the two arc sets.
PairStats pair_stats(std::uint64_t m, std::uint64_t n, const PsiFunction& psi,
                     const ApproxSet& em, const ApproxSet& en);

} // namespace dslab
