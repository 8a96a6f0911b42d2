#include "dslab/seriesmoment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dslab/approxsets.hpp"
#include "dslab/errors.hpp"
#include "dslab/numtheory.hpp"

namespace dslab {

double fc_eval(double x, double c) {
    if (!(x > 0)) return 0.0;
    if (x >= 1) return 1.0;
    double lnu = std::log(-std::log(x));
    if (lnu <= 1.0) return x; // at or above e^{-e} the exponent would amplify: clamp
    return x * std::exp(-c * lnu * std::log(lnu));
}

double hpv_f_eval(double x) {
    if (!(x > 0)) return 0.0;
    if (x >= 1) return 1.0;
    double lx = std::log(x);
    double u = -lx;
    if (u <= 1.0) return x; // at or above 1/e the formula has no damping to offer
    return x * std::exp(lx / std::log(u));
}

RealBounds fc_bounds(const Rat& x, const Rat& c, long prec) {
    if (x < 0) throw std::domain_error("fc_bounds: negative argument");
    if (c <= 0) throw std::domain_error("fc_bounds: damping constant must be positive");
    if (x == 0) return {Rat(0), Rat(0)};
    if (x >= 1) return {Rat(1), Rat(1)};
    if (!below_exp_neg_e(x)) return {x, x};
    return fc_core_bounds(x, c, prec);
}

SeriesReport series_report(const PsiFunction& psi, std::uint64_t N,
                           std::vector<std::uint64_t> checkpoints) {
    if (N < 16)
        throw std::domain_error("series cutoff below 16: the damped terms are undefined there");

    if (checkpoints.empty()) {
        for (std::uint64_t c = 16; c < N; c *= 2) checkpoints.push_back(c);
    }
    checkpoints.push_back(N);
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    while (!checkpoints.empty() && checkpoints.back() > N) checkpoints.pop_back();
    for (std::uint64_t c : checkpoints)
        if (c == 0) throw std::domain_error("checkpoint cutoffs must be positive");

    TotientTable phi(N + 1);
    const Rat& c = psi.c();

    SeriesReport report;
    report.N = N;

    PairwiseSum plain;
    DyadicSum extra, fc_sum;
    std::size_t next_cp = 0;
    for (std::uint64_t n = 1; n <= N; ++n) {
        Rat v = psi.evaluate(n);
        if (v != 0) {
            Rat term = v * Rat(phi[n]) / Rat(Int(n));
            plain.add(term);
            if (n >= 16) {
                RealBounds damp = extra_damping_bounds(c, n);
                extra.add({term / damp.hi, term / damp.lo});
            }
            RealBounds f = fc_bounds(v / Rat(Int(n)), c);
            fc_sum.add({f.lo * Rat(phi[n]), f.hi * Rat(phi[n])});
        }
        while (next_cp < checkpoints.size() && checkpoints[next_cp] == n) {
            SeriesCheckpoint cp;
            cp.N = n;
            cp.partial_plain = plain.total();
            cp.partial_extra = extra.value();
            cp.partial_fc = fc_sum.value();
            report.checkpoints.push_back(std::move(cp));
            ++next_cp;
        }
    }

    report.partial_plain = plain.total();
    report.partial_extra = extra.value();
    report.partial_fc = fc_sum.value();
    return report;
}

MomentBound second_moment_bound(const PsiFunction& psi, std::uint64_t N,
                                std::uint64_t pair_budget) {
    if (N == 0) throw std::domain_error("second moment cutoff must be positive");
    if (N > 1 && (static_cast<unsigned __int128>(N) * (N - 1)) / 2 > pair_budget)
        throw resource_error("pair budget " + std::to_string(pair_budget) + " exceeded by N = " +
                             std::to_string(N) + " (raise with --pairs-budget)");

    std::vector<ApproxSet> sets;
    sets.reserve(N);
    for (std::uint64_t n = 1; n <= N; ++n) sets.push_back(build_E(n, psi));

    Rat total_measure;
    Rat diagonal;
    for (const auto& s : sets) {
        Rat lambda = s.set.measure();
        total_measure += lambda;
        diagonal += lambda;
    }

    PairwiseSum off_diagonal;
    for (std::uint64_t i = 0; i < N; ++i) {
        if (sets[i].set.empty()) continue;
        for (std::uint64_t j = i + 1; j < N; ++j) {
            if (sets[j].set.empty()) continue;
            Rat inter = intersect(sets[i].set, sets[j].set).measure();
            if (inter != 0) off_diagonal.add(std::move(inter));
        }
    }

    MomentBound out;
    out.numerator = total_measure * total_measure;
    out.denominator = diagonal + 2 * off_diagonal.total();
    if (out.denominator > 0) out.bound = out.numerator / out.denominator;
    out.union_measure = truncated_union(psi, 1, N).measure();
    return out;
}

} // namespace dslab
