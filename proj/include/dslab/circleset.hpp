#pragma once

#include <utility>
#include <vector>

#include "dslab/rational.hpp"

namespace dslab {

// One open arc (lo, hi) with 0 <= lo < hi <= 1.
struct Arc {
    Rat lo;
    Rat hi;

    bool operator==(const Arc& other) const { return lo == other.lo && hi == other.hi; }
};

// A finite union of open arcs on R/Z with exact rational endpoints, kept in
// canonical form: arcs sorted by left endpoint, pairwise disjoint, each
// non-empty. An arc crossing 0 is stored split at 0 with the point 0
// excluded, and arcs that merely touch at one endpoint are NOT merged:
// the shared point is genuinely absent from an open union.
class CircleIntervalUnion {
  public:
    CircleIntervalUnion() = default;

    // Canonicalizes arbitrary open sub-intervals of [0,1]. Inputs must
    // already be reduced to 0 <= lo, hi <= 1; empty (lo >= hi) pieces drop.
    static CircleIntervalUnion from_sorted_raw(std::vector<Arc> raw);

    // Builder from (center, radius) pairs reduced mod 1. A radius >= 1/2
    // covers the circle up to a point; radius 0 vanishes; negative radius
    // is a domain error.
    static CircleIntervalUnion from_arcs(const std::vector<std::pair<Rat, Rat>>& raw);

    Rat measure() const;
    bool contains(const Rat& x) const; // x must lie in [0, 1)
    bool empty() const { return arcs_.empty(); }
    std::size_t arc_count() const { return arcs_.size(); }
    const std::vector<Arc>& arcs() const { return arcs_; }

    bool operator==(const CircleIntervalUnion& other) const { return arcs_ == other.arcs_; }

    friend CircleIntervalUnion intersect(const CircleIntervalUnion& a,
                                         const CircleIntervalUnion& b);
    friend CircleIntervalUnion unite(const CircleIntervalUnion& a,
                                     const CircleIntervalUnion& b);

    // Open-arc complement within [0,1]: the gaps between arcs. Differs from
    // the true set complement only by finitely many endpoints, so measures
    // are exact: measure() + complement().measure() == 1.
    CircleIntervalUnion complement() const;

  private:
    std::vector<Arc> arcs_;
};

CircleIntervalUnion intersect(const CircleIntervalUnion& a, const CircleIntervalUnion& b);
CircleIntervalUnion unite(const CircleIntervalUnion& a, const CircleIntervalUnion& b);

} // namespace dslab
