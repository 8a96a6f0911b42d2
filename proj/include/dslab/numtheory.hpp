#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dslab/rational.hpp"

namespace dslab {

// Canonical prime factorization: primes strictly increasing, exponents >= 1,
// empty for n = 1. Reassembling product(prime^exponent) gives back n.
struct Factorization {
    std::uint64_t n = 1;
    std::vector<std::pair<std::uint64_t, unsigned>> factors;
};

// Deterministic trial division; n = 1 yields an empty factor list.
Factorization factorize(std::uint64_t n);

// Number of 1 <= a <= n with gcd(a, n) = 1.
std::uint64_t euler_phi(std::uint64_t n);

// Sorted distinct primes dividing m*n / gcd(m,n)^2. Since m/g and n/g are
// coprime, this is primes(m/g) union primes(n/g); no product is ever formed,
// so 64-bit inputs cannot overflow.
std::vector<std::uint64_t> cross_radical_primes(std::uint64_t m, std::uint64_t n);

// phi(n) for all n <= limit, index n (entry 0 unused). The limit is checked
// against the entry budget; oversized requests raise resource_error rather
// than silently allocating.
class TotientTable {
  public:
    explicit TotientTable(std::uint64_t limit,
                          std::uint64_t entry_budget = kDefaultEntryBudget);

    std::uint64_t limit() const { return limit_; }
    std::uint64_t operator[](std::uint64_t n) const { return phi_[n]; }

    static constexpr std::uint64_t kDefaultEntryBudget = 100'000'000;

  private:
    std::uint64_t limit_;
    std::vector<std::uint64_t> phi_;
};

// Smallest-prime-factor sieve; backs fast factorization inside scans.
class SpfTable {
  public:
    explicit SpfTable(std::uint64_t limit,
                      std::uint64_t entry_budget = TotientTable::kDefaultEntryBudget);

    std::uint64_t limit() const { return limit_; }
    Factorization factorize(std::uint64_t n) const;
    // Distinct primes of n in increasing order.
    std::vector<std::uint64_t> distinct_primes(std::uint64_t n) const;

  private:
    std::uint64_t limit_;
    std::vector<std::uint32_t> spf_;
};

} // namespace dslab
