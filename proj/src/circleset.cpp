#include "dslab/circleset.hpp"

#include <algorithm>
#include <stdexcept>

namespace dslab {

namespace {

// Reduce x into [0, 1).
Rat frac_mod1(Rat x) {
    Int fl = rat_floor(x);
    if (fl != 0) x -= Rat(fl);
    return x;
}

} // namespace

CircleIntervalUnion CircleIntervalUnion::from_sorted_raw(std::vector<Arc> raw) {
    std::vector<Arc> kept;
    kept.reserve(raw.size());
    for (auto& a : raw) {
        if (a.lo >= a.hi) continue;
        if (a.lo < 0 || a.hi > 1) throw std::domain_error("arc endpoints must lie in [0,1]");
        kept.push_back(std::move(a));
    }
    std::sort(kept.begin(), kept.end(),
              [](const Arc& x, const Arc& y) { return x.lo < y.lo || (x.lo == y.lo && x.hi < y.hi); });

    CircleIntervalUnion out;
    for (auto& a : kept) {
        // Merge only genuine overlap. Arcs that touch at a single endpoint
        // stay separate: the shared point is excluded from an open union.
        if (!out.arcs_.empty() && a.lo < out.arcs_.back().hi) {
            if (a.hi > out.arcs_.back().hi) out.arcs_.back().hi = std::move(a.hi);
        } else {
            out.arcs_.push_back(std::move(a));
        }
    }
    return out;
}

CircleIntervalUnion CircleIntervalUnion::from_arcs(const std::vector<std::pair<Rat, Rat>>& raw) {
    std::vector<Arc> pieces;
    pieces.reserve(raw.size() + 4);
    for (const auto& [center, radius] : raw) {
        if (radius < 0) throw std::domain_error("negative arc radius");
        if (radius == 0) continue;

        if (2 * radius >= 1) {
            // The arc covers the whole circle except possibly the single
            // point diametrically opposite the center.
            if (2 * radius > 1) {
                pieces.push_back({Rat(0), Rat(1)});
            } else {
                Rat cut = frac_mod1(center + radius);
                pieces.push_back({Rat(0), cut});
                pieces.push_back({cut, Rat(1)});
            }
            continue;
        }

        Rat c = frac_mod1(center);
        Rat lo = c - radius;
        Rat hi = c + radius;
        if (lo < 0) {
            pieces.push_back({lo + 1, Rat(1)});
            pieces.push_back({Rat(0), std::move(hi)});
        } else if (hi > 1) {
            pieces.push_back({std::move(lo), Rat(1)});
            pieces.push_back({Rat(0), hi - 1});
        } else {
            pieces.push_back({std::move(lo), std::move(hi)});
        }
    }
    return from_sorted_raw(std::move(pieces));
}

Rat CircleIntervalUnion::measure() const {
    Rat total;
    for (const auto& a : arcs_) total += a.hi - a.lo;
    return total;
}

bool CircleIntervalUnion::contains(const Rat& x) const {
    if (x < 0 || x >= 1) throw std::domain_error("membership point must lie in [0,1)");
    // Last arc starting strictly left of x is the only candidate.
    auto it = std::upper_bound(arcs_.begin(), arcs_.end(), x,
                               [](const Rat& v, const Arc& a) { return v <= a.lo; });
    if (it == arcs_.begin()) return false;
    --it;
    return x < it->hi;
}

CircleIntervalUnion intersect(const CircleIntervalUnion& a, const CircleIntervalUnion& b) {
    CircleIntervalUnion out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.arcs_.size() && j < b.arcs_.size()) {
        const Arc& x = a.arcs_[i];
        const Arc& y = b.arcs_[j];
        const Rat& lo = x.lo > y.lo ? x.lo : y.lo;
        const Rat& hi = x.hi < y.hi ? x.hi : y.hi;
        if (lo < hi) out.arcs_.push_back({lo, hi});
        // Advance whichever arc ends first; both when they end together.
        if (x.hi <= y.hi) ++i;
        if (y.hi <= x.hi) ++j;
    }
    return out;
}

CircleIntervalUnion unite(const CircleIntervalUnion& a, const CircleIntervalUnion& b) {
    std::vector<Arc> all;
    all.reserve(a.arcs_.size() + b.arcs_.size());
    all.insert(all.end(), a.arcs_.begin(), a.arcs_.end());
    all.insert(all.end(), b.arcs_.begin(), b.arcs_.end());
    return CircleIntervalUnion::from_sorted_raw(std::move(all));
}

CircleIntervalUnion CircleIntervalUnion::complement() const {
    std::vector<Arc> gaps;
    gaps.reserve(arcs_.size() + 1);
    Rat prev(0);
    for (const auto& a : arcs_) {
        if (a.lo > prev) gaps.push_back({prev, a.lo});
        if (a.hi > prev) prev = a.hi;
    }
    if (prev < 1) gaps.push_back({std::move(prev), Rat(1)});
    return from_sorted_raw(std::move(gaps));
}

} // namespace dslab
