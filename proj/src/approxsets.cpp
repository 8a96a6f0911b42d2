#include "dslab/approxsets.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "dslab/errors.hpp"
#include "dslab/numtheory.hpp"

namespace dslab {

namespace {

// a/n with gcd(a,n) = 1, already canonical so the reduction step is skipped.
Rat coprime_fraction(std::uint64_t a, std::uint64_t n) {
    Rat q;
    mpz_set_ui(mpq_numref(q.get_mpq_t()), a);
    mpz_set_ui(mpq_denref(q.get_mpq_t()), n);
    return q;
}

} // namespace

ApproxSet build_E(std::uint64_t n, const PsiFunction& psi) {
    if (n == 0) throw std::domain_error("E_n needs n >= 1");
    ApproxSet out;
    out.n = n;
    out.psi_n = psi.evaluate(n);
    if (out.psi_n == 0) return out;

    Rat radius = out.psi_n / Rat(Int(n));
    std::vector<std::pair<Rat, Rat>> arcs;
    for (std::uint64_t a = 1; a <= n; ++a) {
        if (std::gcd(a, n) != 1) continue;
        arcs.emplace_back(coprime_fraction(a, n), radius);
    }
    out.set = CircleIntervalUnion::from_arcs(arcs);
    return out;
}

MeasureCheck measure_formula_check(std::uint64_t n, const PsiFunction& psi) {
    MeasureCheck out;
    out.computed = build_E(n, psi).set.measure();
    out.formula = 2 * psi.evaluate(n) * Rat(euler_phi(n)) / Rat(Int(n));
    if (out.formula > 1) out.formula = 1;
    out.equal = (out.computed == out.formula);
    return out;
}

CircleIntervalUnion truncated_union(const PsiFunction& psi, std::uint64_t from, std::uint64_t to,
                                    std::uint64_t arc_budget) {
    if (from == 0 || from > to) throw std::domain_error("invalid truncation range");
    std::vector<Arc> pieces;
    std::uint64_t gathered = 0;
    for (std::uint64_t n = from; n <= to; ++n) {
        ApproxSet e = build_E(n, psi);
        gathered += e.set.arc_count();
        if (gathered > arc_budget)
            throw resource_error("arc budget " + std::to_string(arc_budget) +
                                 " exceeded at n = " + std::to_string(n) +
                                 " (raise with --arc-budget)");
        for (const auto& a : e.set.arcs()) pieces.push_back(a);
    }
    return CircleIntervalUnion::from_sorted_raw(std::move(pieces));
}

MonteCarloEstimate montecarlo_union_measure(const PsiFunction& psi, std::uint64_t from,
                                            std::uint64_t to, std::uint64_t samples,
                                            std::uint64_t seed) {
    if (from == 0 || from > to) throw std::domain_error("invalid truncation range");
    if (samples == 0) throw std::domain_error("need at least one sample");

    const Int two64 = Int(1) << 64;

    // Per-n membership data: |n·x − a| < psi(n) tested exactly against the
    // dyadic sample x = r/2^64 as |n·r − a·2^64|·den < num·2^64.
    struct Entry {
        std::uint64_t n;
        Int num_scaled; // num(psi) * 2^64
        Int den;        // den(psi)
        long window;    // how far the nearest admissible a can sit from floor(n x)
    };
    std::vector<Entry> entries;
    for (std::uint64_t n = from; n <= to; ++n) {
        Rat v = psi.evaluate(n);
        if (v == 0) continue;
        Entry e;
        e.n = n;
        e.num_scaled = Int(v.get_num()) << 64;
        e.den = v.get_den();
        e.window = static_cast<long>(rat_floor(v).get_ui()) + 1;
        entries.push_back(std::move(e));
    }

    MonteCarloEstimate out;
    out.samples = samples;
    if (entries.empty()) return out;

    std::mt19937_64 rng(seed);
    Int nr, a_scaled, diff;
    for (std::uint64_t s = 0; s < samples; ++s) {
        std::uint64_t r = rng();
        bool hit = false;
        for (const Entry& e : entries) {
            nr = Int(e.n) * r;
            Int a0 = nr >> 64;
            for (long off = -e.window; off <= e.window + 1 && !hit; ++off) {
                Int a = a0 + off;
                Int res = a % Int(e.n);
                if (res < 0) res += Int(e.n);
                if (mpz_gcd_ui(nullptr, res.get_mpz_t(), e.n) != 1) continue;
                diff = abs(nr - (a << 64)) * e.den;
                if (diff < e.num_scaled) hit = true;
            }
            if (hit) break;
        }
        if (hit) ++out.hits;
    }

    out.estimate = static_cast<double>(out.hits) / static_cast<double>(samples);
    out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(samples));
    return out;
}

} // namespace dslab
