#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dslab/rational.hpp"

namespace dslab {

// The doubly exponential block boundaries X_0 < X_1 < X_2 < ... used to
// partition the integers into ranges [X_h, X_{h+1}). At the defaults the
// boundaries run 2, 16, 256, 65536, 2^32, ...: the first step raises the
// base to growth_base, every later boundary is the square of the previous
// one.  growth_base 2 gives the compressed tower 2, 4, 16, 256, ... used
// for fast experiments.
class BlockTower {
  public:
    explicit BlockTower(unsigned long tower_base = 2, unsigned long growth_base = 4);

    // X_h, the lower edge of block h. Precomputed well past any feasible
    // input; deeper levels are computed on the fly without shared state.
    const Int& lower(unsigned h) const;

    // h such that X_h <= n < X_{h+1}; nullopt below the first block.
    std::optional<unsigned> block_index(const Int& n) const;
    std::optional<unsigned> block_index(std::uint64_t n) const;

    unsigned long tower_base() const { return tower_base_; }
    unsigned long growth_base() const { return growth_base_; }

  private:
    unsigned long tower_base_;
    unsigned long growth_base_;
    std::vector<Int> bounds_;
};

} // namespace dslab
