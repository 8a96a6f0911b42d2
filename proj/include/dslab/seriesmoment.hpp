#pragma once

#include <cstdint>
#include <vector>

#include "dslab/certified.hpp"
#include "dslab/psifun.hpp"

namespace dslab {

// Damping transforms, piecewise over [0, inf): 0 at 0, identity clamp on
// the range where the nested logarithms would amplify rather than damp,
// the full formula below it, and 1 from 1 on.
double fc_eval(double x, double c);
double hpv_f_eval(double x);

// Certified enclosure of f_c at an exact rational argument.
RealBounds fc_bounds(const Rat& x, const Rat& c, long prec = 128);

struct SeriesCheckpoint {
    std::uint64_t N = 0;
    Rat partial_plain;
    RealBounds partial_extra;
    RealBounds partial_fc;
};

struct SeriesReport {
    std::uint64_t N = 0;
    Rat partial_plain;       // sum of phi(n) psi(n) / n, exact
    RealBounds partial_extra; // same terms divided by exp(c (lnln n)(lnlnln n)), from n = 16
    RealBounds partial_fc;    // sum of f_c(psi(n)/n) phi(n)
    std::vector<SeriesCheckpoint> checkpoints;
};

// Partial sums up to N; checkpoint cutoffs default to the doubling
// sequence 16, 32, 64, ... strictly below N, plus N itself. The damped
// series needs ln ln ln n defined, hence N >= 16 and terms from n = 16.
SeriesReport series_report(const PsiFunction& psi, std::uint64_t N,
                           std::vector<std::uint64_t> checkpoints = {});

struct MomentBound {
    Rat numerator;     // (sum over n <= N of lambda(E_n))^2
    Rat denominator;   // sum over all ordered (m,n) of lambda(E_m cap E_n), diagonal included
    Rat bound;         // numerator / denominator; 0 when the denominator is 0
    Rat union_measure; // exact measure of the union E_1 .. E_N
};

// The finite second-moment lower bound: bound <= union_measure always.
MomentBound second_moment_bound(const PsiFunction& psi, std::uint64_t N,
                                std::uint64_t pair_budget = 2'000'000);

} // namespace dslab
