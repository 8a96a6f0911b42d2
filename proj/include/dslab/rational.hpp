#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "dslab/errors.hpp"

namespace dslab {

using Int = mpz_class;
using Rat = mpq_class;

// Parses "p", "-p" or "p/q" (decimal digits, q > 0) into a canonical
// rational. Anything else throws parse_error at `location`.
Rat parse_rational(const std::string& text, const std::string& location = "rational");

// "p/q", or just "p" when the denominator is 1.
std::string format_rational(const Rat& q);

inline Rat make_rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// floor(q) as a big integer.
Int rat_floor(const Rat& q);

// Balanced pairwise summation. Keeps intermediate numerators/denominators
// balanced in size, which matters for sums of ~10^6 rationals.
Rat tree_sum(std::vector<Rat> terms);

// Streaming variant of tree_sum: O(log n) live partial sums, each level
// holding a power-of-two run of terms. Because rational addition is exactly
// associative, totals agree with any other exact summation order.
class PairwiseSum {
  public:
    void add(Rat term) {
        std::size_t level = 0;
        while (level < slots_.size() && occupied_[level]) {
            term += slots_[level];
            occupied_[level] = false;
            ++level;
        }
        if (level == slots_.size()) {
            slots_.emplace_back(std::move(term));
            occupied_.push_back(true);
        } else {
            slots_[level] = std::move(term);
            occupied_[level] = true;
        }
    }

    Rat total() const {
        Rat sum;
        for (std::size_t i = 0; i < slots_.size(); ++i)
            if (occupied_[i]) sum += slots_[i];
        return sum;
    }

  private:
    std::vector<Rat> slots_;
    std::vector<bool> occupied_;
};

// Exact accumulator over a fixed common denominator: add(q) requires
// den(q) | denominator. Merges are plain integer adds, so partitioned
// parallel sums reduce to the same value in any order.
class FixedDenomSum {
  public:
    FixedDenomSum() : den_(1) {}
    explicit FixedDenomSum(Int den) : den_(std::move(den)) {}

    void add(const Rat& q);
    void merge(const FixedDenomSum& other);
    Rat value() const;
    const Int& denominator() const { return den_; }

  private:
    Int den_;
    Int num_ = 0;
};

} // namespace dslab
