#include "dslab/blocks.hpp"

#include <stdexcept>

namespace dslab {

namespace {

constexpr unsigned kPrecomputedLevels = 20;

} // namespace

BlockTower::BlockTower(unsigned long tower_base, unsigned long growth_base)
    : tower_base_(tower_base), growth_base_(growth_base) {
    if (tower_base < 2 || growth_base < 2)
        throw std::domain_error("block tower bases must be at least 2");
    bounds_.reserve(kPrecomputedLevels + 1);
    bounds_.emplace_back(tower_base);
    Int x1;
    mpz_ui_pow_ui(x1.get_mpz_t(), tower_base, growth_base);
    bounds_.push_back(x1);
    while (bounds_.size() <= kPrecomputedLevels) bounds_.push_back(bounds_.back() * bounds_.back());
}

const Int& BlockTower::lower(unsigned h) const {
    if (h >= bounds_.size()) throw std::domain_error("block level beyond precomputed tower");
    return bounds_[h];
}

std::optional<unsigned> BlockTower::block_index(const Int& n) const {
    if (n < bounds_.front()) return std::nullopt;
    for (unsigned h = 0; h + 1 < bounds_.size(); ++h) {
        if (n < bounds_[h + 1]) return h;
    }
    // Past the precomputed table: keep squaring a local copy.
    Int bound = bounds_.back();
    for (unsigned h = static_cast<unsigned>(bounds_.size()) - 1;; ++h) {
        bound *= bound;
        if (n < bound) return h;
    }
}

std::optional<unsigned> BlockTower::block_index(std::uint64_t n) const {
    return block_index(Int(static_cast<unsigned long>(n)));
}

} // namespace dslab
