#include "dslab/overlap.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dslab/errors.hpp"
#include "dslab/numtheory.hpp"

namespace dslab {

namespace {

using i64 = std::int64_t;
using i128 = __int128;

// Largest integer strictly below the positive rational bound, or -1 if none.
// Turns the open comparison |diff| < bound into an integer one diff <= T.
i64 strict_threshold(const Rat& bound) {
    if (bound <= 0) return -1;
    Int fl = rat_floor(bound);
    if (Rat(fl) == bound) fl -= 1;
    if (!fl.fits_slong_p()) throw resource_error("overlap threshold exceeds 63 bits");
    return fl.get_si();
}

i64 floor_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return static_cast<i64>(q);
}

i64 ceil_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
    return static_cast<i64>(q);
}

i64 mod_positive(i128 a, i64 m) {
    i128 r = a % m;
    if (r < 0) r += m;
    return static_cast<i64>(r);
}

// Inverse of a mod m for gcd(a, m) = 1, m >= 1.
i64 mod_inverse(i64 a, i64 m) {
    if (m == 1) return 0;
    i64 old_r = a % m, r = m;
    if (old_r < 0) old_r += m;
    i64 old_s = 1, s = 0;
    while (r != 0) {
        i64 q = old_r / r;
        old_r -= q * r;
        std::swap(old_r, r);
        old_s -= q * s;
        std::swap(old_s, s);
    }
    old_s %= m;
    if (old_s < 0) old_s += m;
    return old_s;
}

// Number of t in [lo, hi] with t ≡ r (mod mod).
i64 count_in_class(i64 lo, i64 hi, i64 r, i64 mod) {
    return floor_div(static_cast<i128>(hi) - r, mod) - floor_div(static_cast<i128>(lo) - 1 - r, mod);
}

struct PrimeConstraint {
    i64 p;
    std::vector<i64> bad; // forbidden t residues mod p, at most two
};

// Points of [lo, hi] avoiding every forbidden residue class, by
// inclusion-exclusion with CRT-combined classes.
i64 sieve_count(i64 lo, i64 hi, const std::vector<PrimeConstraint>& cons, std::size_t idx,
                i64 mod, i64 r, int sign) {
    if (idx == cons.size()) return sign * count_in_class(lo, hi, r, mod);
    i64 total = sieve_count(lo, hi, cons, idx + 1, mod, r, sign);
    for (i64 s : cons[idx].bad) {
        i64 p = cons[idx].p;
        // x ≡ r (mod mod) and x ≡ s (mod p); the primes are distinct so the
        // moduli are coprime.
        i64 k = mod_positive(static_cast<i128>(s - r) * mod_inverse(mod % p, p), p);
        i128 rr = static_cast<i128>(mod) * k + r;
        total += sieve_count(lo, hi, cons, idx + 1, mod * p, static_cast<i64>(rr), -sign);
    }
    return total;
}

std::uint64_t sigma_brute(std::uint64_t m, std::uint64_t n, const Rat& A) {
    i64 T = strict_threshold(A);
    if (T < 0) return 0;
    std::vector<std::uint64_t> as, bs;
    for (std::uint64_t a = 1; a < m; ++a)
        if (std::gcd(a, m) == 1) as.push_back(a);
    for (std::uint64_t b = 1; b < n; ++b)
        if (std::gcd(b, n) == 1) bs.push_back(b);
    std::uint64_t count = 0;
    for (std::uint64_t a : as) {
        i64 an = static_cast<i64>(a * n);
        for (std::uint64_t b : bs) {
            i64 diff = an - static_cast<i64>(b * m);
            if (std::llabs(diff) <= T) ++count;
        }
    }
    return count;
}

std::uint64_t sigma_fast(std::uint64_t m, std::uint64_t n, const Rat& A) {
    std::uint64_t g = std::gcd(m, n);
    i64 H = strict_threshold(A / Rat(g));
    if (H < 0) return 0;

    i64 mi = static_cast<i64>(m), ni = static_cast<i64>(n);
    i64 mp = mi / static_cast<i64>(g), np = ni / static_cast<i64>(g);
    i64 inv_np = mod_inverse(np, mp);

    std::vector<std::uint64_t> primes_m, primes_n;
    for (const auto& pe : factorize(m).factors) primes_m.push_back(pe.first);
    for (const auto& pe : factorize(n).factors) primes_n.push_back(pe.first);

    std::uint64_t total = 0;
    for (i64 h = -H; h <= H; ++h) {
        // a np ≡ h (mod mp) pins a ≡ a0; each t then gives one lattice point.
        i64 a0 = mod_positive(static_cast<i128>(mod_positive(h, mp)) * inv_np, mp);
        i64 b0 = static_cast<i64>((static_cast<i128>(a0) * np - h) / mp);

        i64 t_lo = ceil_div(1 - a0, mp);
        i64 t_hi = floor_div(mi - 1 - a0, mp);
        t_lo = std::max(t_lo, ceil_div(1 - b0, np));
        t_hi = std::min(t_hi, floor_div(ni - 1 - b0, np));
        if (t_lo > t_hi) continue;

        bool dead = false;
        std::vector<PrimeConstraint> cons;
        auto add_bad = [&](std::uint64_t p, i64 residue) {
            for (auto& c : cons) {
                if (c.p == static_cast<i64>(p)) {
                    for (i64 existing : c.bad)
                        if (existing == residue) return;
                    c.bad.push_back(residue);
                    return;
                }
            }
            cons.push_back({static_cast<i64>(p), {residue}});
        };
        for (std::uint64_t p : primes_m) {
            i64 pi = static_cast<i64>(p);
            if (mp % pi == 0) {
                // a(t) is constant mod p; either always coprime or never.
                if (a0 % pi == 0) { dead = true; break; }
            } else {
                add_bad(p, mod_positive(-static_cast<i128>(a0) * mod_inverse(mp % pi, pi), pi));
            }
        }
        if (dead) continue;
        for (std::uint64_t p : primes_n) {
            i64 pi = static_cast<i64>(p);
            if (np % pi == 0) {
                if (mod_positive(b0, pi) == 0) { dead = true; break; }
            } else {
                add_bad(p, mod_positive(-static_cast<i128>(b0) * mod_inverse(np % pi, pi), pi));
            }
        }
        if (dead) continue;

        total += static_cast<std::uint64_t>(sieve_count(t_lo, t_hi, cons, 0, 1, 0, 1));
    }
    return total;
}

} // namespace

Rat quantity_A(std::uint64_t m, std::uint64_t n, const PsiFunction& psi) {
    if (m == 0 || n == 0) throw std::domain_error("pair indices must be positive");
    Rat left = Rat(Int(m)) * psi.evaluate(n);
    Rat right = Rat(Int(n)) * psi.evaluate(m);
    return 2 * (left > right ? left : right);
}

Rat quantity_D(std::uint64_t m, std::uint64_t n, const PsiFunction& psi) {
    if (m == n) throw std::domain_error("pair quantities need m != n");
    return quantity_A(m, n, psi) / Rat(2 * Int(std::gcd(m, n)));
}

Rat factor_P(std::uint64_t m, std::uint64_t n, const PsiFunction& psi) {
    Rat d = quantity_D(m, n, psi);
    Rat out(1);
    for (std::uint64_t p : cross_radical_primes(m, n)) {
        if (Rat(p) > d) out *= Rat(p) / Rat(p - 1);
    }
    return out;
}

std::uint64_t count_sigma(std::uint64_t m, std::uint64_t n, const PsiFunction& psi,
                          SigmaMethod method) {
    if (m < 2 || n < 2) return 0;
    if (m >= (1ull << 31) || n >= (1ull << 31))
        throw resource_error("sigma counting supports indices below 2^31");
    Rat A = quantity_A(m, n, psi);
    return method == SigmaMethod::brute ? sigma_brute(m, n, A) : sigma_fast(m, n, A);
}

PairStats pair_stats(std::uint64_t m, std::uint64_t n, const PsiFunction& psi) {
    return pair_stats(m, n, psi, build_E(m, psi), build_E(n, psi));
}

PairStats pair_stats(std::uint64_t m, std::uint64_t n, const PsiFunction& psi,
                     const ApproxSet& em, const ApproxSet& en) {
    if (m == n) throw std::domain_error("pair stats need m != n");
    PairStats st;
    st.m = m;
    st.n = n;
    st.lambda_m = em.set.measure();
    st.lambda_n = en.set.measure();
    st.lambda_inter = intersect(em.set, en.set).measure();
    st.A = quantity_A(m, n, psi);
    st.D = quantity_D(m, n, psi);
    st.P = factor_P(m, n, psi);
    st.sigma = count_sigma(m, n, psi, SigmaMethod::fast);
    st.indep_rhs = st.lambda_m * st.lambda_n * st.P;
    if (st.indep_rhs > 0) st.ratio = st.lambda_inter / st.indep_rhs;
    return st;
}

} // namespace dslab
