#pragma once

#include <cstdint>

#include "dslab/circleset.hpp"
#include "dslab/psifun.hpp"

namespace dslab {

// E_n: open arcs of radius psi(n)/n around the reduced fractions a/n.
struct ApproxSet {
    std::uint64_t n = 1;
    Rat psi_n;
    CircleIntervalUnion set;
};

ApproxSet build_E(std::uint64_t n, const PsiFunction& psi);

struct MeasureCheck {
    Rat computed; // measure(build_E(n))
    Rat formula;  // min(1, 2 psi(n) phi(n) / n)
    bool equal = false;
};

MeasureCheck measure_formula_check(std::uint64_t n, const PsiFunction& psi);

inline constexpr std::uint64_t kDefaultArcBudget = 10'000'000;

// Exact union of E_from .. E_to. The budget caps the total number of raw
// arcs gathered before canonicalization.
CircleIntervalUnion truncated_union(const PsiFunction& psi, std::uint64_t from, std::uint64_t to,
                                    std::uint64_t arc_budget = kDefaultArcBudget);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
};

// Independent estimate of the truncated-union measure: uniform dyadic
// samples, membership decided exactly per n without building any arcs.
MonteCarloEstimate montecarlo_union_measure(const PsiFunction& psi, std::uint64_t from,
                                            std::uint64_t to, std::uint64_t samples,
                                            std::uint64_t seed);

} // namespace dslab
