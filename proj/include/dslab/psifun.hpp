#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dslab/blocks.hpp"
#include "dslab/rational.hpp"

namespace dslab {

// Shared default tower (bases 2 and 4) used when no custom tower is supplied.
std::shared_ptr<const BlockTower> default_tower();

// The approximating function: non-negative rational values at each positive
// integer, given either by a finite table or by a parametric family, with an
// optional support restriction (block-parity filter or explicit range) and
// the damping constant c carried alongside for the extra-divergence series.
class PsiFunction {
  public:
    enum class Family { constant, reciprocal, log_damped };
    enum class Parity { even, odd };

    struct Violation {
        std::uint64_t n;
        Rat value;
        bool above_half;  // otherwise 0 < value < 1/n
    };

    static PsiFunction constant(Rat q, Rat c);
    static PsiFunction reciprocal(Rat q, Rat c);
    static PsiFunction log_damped(Rat q, Rat c);
    static PsiFunction from_table(std::map<std::uint64_t, Rat> values, Rat c);

    // 0 outside the support restriction and outside a table's keys.
    Rat evaluate(std::uint64_t n) const;

    const Rat& c() const { return c_; }
    bool is_table() const { return !family_.has_value(); }

    // Copies of this function restricted to even-indexed and odd-indexed
    // blocks; integers below the first block evaluate to 0 in both parts.
    std::pair<PsiFunction, PsiFunction> split_by_parity() const;

    PsiFunction restricted_to_parity(Parity p) const;
    PsiFunction restricted_to_range(std::uint64_t min, std::uint64_t max) const;

    std::optional<Parity> parity_filter() const { return parity_; }

    // Copy with any parity restriction lifted; the range filter stays.
    PsiFunction without_parity() const;

    // Copy with the damping constant replaced; values are untouched.
    PsiFunction with_c(const Rat& c) const;

    // Pointwise multiple q * this; factor must be >= 0.
    PsiFunction scaled(const Rat& factor) const;

    // Every n in [lo, hi] where 0 < psi(n) < 1/n or psi(n) > 1/2.
    std::vector<Violation> validate_normalization(std::uint64_t lo, std::uint64_t hi) const;

    void attach_tower(std::shared_ptr<const BlockTower> tower);
    const BlockTower& tower() const { return *tower_; }

    static PsiFunction load(const std::string& json_text);
    static PsiFunction load_file(const std::string& path);
    std::string serialize() const;

  private:
    PsiFunction() = default;

    Rat raw_value(std::uint64_t n) const;

    std::optional<Family> family_;
    Rat q_;
    std::map<std::uint64_t, Rat> table_;
    Rat c_;
    std::optional<Parity> parity_;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> range_; // inclusive
    std::shared_ptr<const BlockTower> tower_ = default_tower();
};

} // namespace dslab
