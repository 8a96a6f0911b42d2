#include "dslab/certified.hpp"

#include <mpfr.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dslab {
namespace {

constexpr long kMaxPrec = 1 << 14;

Rat mpfr_to_rat(mpfr_srcptr x) {
    if (!mpfr_number_p(x))
        throw std::runtime_error("certified: non-finite intermediate");
    mpq_t q;
    mpq_init(q);
    mpfr_get_q(q, x);
    Rat out(q);
    mpq_clear(q);
    out.canonicalize();
    return out;
}

class Mpfr {
  public:
    explicit Mpfr(long prec) { mpfr_init2(x_, prec); }
    ~Mpfr() { mpfr_clear(x_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
    operator mpfr_ptr() { return x_; }
    mpfr_ptr get() { return x_; }

  private:
    mpfr_t x_;
};

Rat ln_dir(const Rat& q, mpfr_rnd_t rnd, long prec) {
    Mpfr t(prec);
    mpfr_set_q(t, q.get_mpq_t(), rnd);
    mpfr_log(t, t, rnd);
    return mpfr_to_rat(t);
}

// Enclosure of 1/e.
RealBounds inv_e_bounds(long prec) {
    RealBounds b;
    b.lo = exp_dir_lo(Rat(-1), prec);
    b.hi = exp_dir_hi(Rat(-1), prec);
    return b;
}

// min/max over the four corner products a*b, a in [A.lo,A.hi], b in [B.lo,B.hi].
RealBounds interval_mul(const RealBounds& A, const RealBounds& B) {
    Rat c1 = A.lo * B.lo;
    Rat c2 = A.lo * B.hi;
    Rat c3 = A.hi * B.lo;
    Rat c4 = A.hi * B.hi;
    RealBounds out;
    out.lo = std::min(std::min(c1, c2), std::min(c3, c4));
    out.hi = std::max(std::max(c1, c2), std::max(c3, c4));
    return out;
}

} // namespace

std::string rat_to_decimal(const Rat& q, int digits) {
    Mpfr m(256);
    mpfr_set_q(m, q.get_mpq_t(), MPFR_RNDN);
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Rg", digits, m.get());
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

std::string bounds_to_decimal(const RealBounds& b, int digits) {
    return rat_to_decimal(b.mid(), digits);
}

RealBounds ln_bounds(const Rat& q, long prec) {
    if (q <= 0)
        throw std::domain_error("ln_bounds: argument must be positive");
    RealBounds b;
    b.lo = ln_dir(q, MPFR_RNDD, prec);
    b.hi = ln_dir(q, MPFR_RNDU, prec);
    return b;
}

Rat exp_dir_lo(const Rat& t, long prec) {
    Mpfr x(prec);
    mpfr_set_q(x, t.get_mpq_t(), MPFR_RNDD);
    mpfr_exp(x, x, MPFR_RNDD);
    return mpfr_to_rat(x);
}

Rat exp_dir_hi(const Rat& t, long prec) {
    Mpfr x(prec);
    mpfr_set_q(x, t.get_mpq_t(), MPFR_RNDU);
    mpfr_exp(x, x, MPFR_RNDU);
    return mpfr_to_rat(x);
}

long floor_ln(const Rat& q) {
    if (q <= 0)
        throw std::domain_error("floor_ln: argument must be positive");
    if (q == 1)
        return 0;
    for (long prec = 64; prec <= kMaxPrec; prec *= 2) {
        RealBounds b = ln_bounds(q, prec);
        Int flo = rat_floor(b.lo);
        Int fhi = rat_floor(b.hi);
        if (flo == fhi)
            return static_cast<long>(flo.get_si());
    }
    throw std::runtime_error("floor_ln: failed to certify at max precision");
}

RealBounds log_log_bounds(std::uint64_t X, long prec) {
    if (X < 3)
        throw std::domain_error("log_log_bounds: X must be >= 3 so that ln ln X > 0");
    RealBounds b;
    Mpfr t(prec);
    mpfr_set_ui(t, X, MPFR_RNDD);
    mpfr_log(t, t, MPFR_RNDD);
    mpfr_log(t, t, MPFR_RNDD);
    b.lo = mpfr_to_rat(t);
    mpfr_set_ui(t, X, MPFR_RNDU);
    mpfr_log(t, t, MPFR_RNDU);
    mpfr_log(t, t, MPFR_RNDU);
    b.hi = mpfr_to_rat(t);
    return b;
}

RealBounds c_R_logR_bounds(const Rat& c, std::uint64_t X, long prec) {
    if (c <= 0)
        throw std::domain_error("c_R_logR_bounds: c must be positive");
    RealBounds R = log_log_bounds(X, prec);
    if (R.lo <= 0)
        throw std::domain_error("c_R_logR_bounds: R = ln ln X must be positive");
    RealBounds lnR;
    lnR.lo = ln_dir(R.lo, MPFR_RNDD, prec);
    lnR.hi = ln_dir(R.hi, MPFR_RNDU, prec);
    RealBounds v = interval_mul(R, lnR);
    // r * ln r has an interior minimum -1/e at r = 1/e; if the R enclosure
    // could contain that point, widen the lower bound to cover it.
    RealBounds ie = inv_e_bounds(prec);
    if (R.lo <= ie.hi && R.hi >= ie.lo) {
        Rat dip = -ie.hi;
        if (dip < v.lo) v.lo = dip;
    }
    v.lo *= c;
    v.hi *= c;
    if (v.lo > v.hi)
        std::swap(v.lo, v.hi);
    return v;
}

Int floor_c_R_logR(const Rat& c, std::uint64_t X) {
    for (long prec = 64; prec <= kMaxPrec; prec *= 2) {
        RealBounds b = c_R_logR_bounds(c, X, prec);
        Int flo = rat_floor(b.lo);
        Int fhi = rat_floor(b.hi);
        if (flo == fhi)
            return flo;
    }
    throw std::runtime_error("floor_c_R_logR: failed to certify at max precision");
}

long floor_R(std::uint64_t X) {
    for (long prec = 64; prec <= kMaxPrec; prec *= 2) {
        RealBounds b = log_log_bounds(X, prec);
        Int flo = rat_floor(b.lo);
        Int fhi = rat_floor(b.hi);
        if (flo == fhi)
            return static_cast<long>(flo.get_si());
    }
    throw std::runtime_error("floor_R: failed to certify at max precision");
}

Rat upper_one_plus_lnD_over_R(const Rat& D, std::uint64_t X, long prec) {
    if (D < 1)
        throw std::domain_error("upper_one_plus_lnD_over_R: requires D >= 1");
    Rat num_hi = 1 + ln_dir(D, MPFR_RNDU, prec); // >= 1 since D >= 1
    RealBounds R = log_log_bounds(X, prec);
    if (R.lo <= 0)
        throw std::domain_error("upper_one_plus_lnD_over_R: R must be positive");
    return num_hi / R.lo;
}

Rat dyadic_exp_neg(long k) {
    if (k < 1)
        throw std::domain_error("dyadic_exp_neg: k must be >= 1");
    long prec = 160 + 2 * k;
    Mpfr t(prec);
    mpfr_set_si(t, -k, MPFR_RNDD);
    mpfr_exp(t, t, MPFR_RNDD);
    mpfr_mul_2si(t, t, 96, MPFR_RNDD); // exact scaling
    mpfr_floor(t, t);
    Rat out = mpfr_to_rat(t);
    out /= Rat(Int(1) << 96);
    return out;
}

RealBounds neg_ln_bounds(const Rat& q, long prec) {
    if (q <= 0 || q > 1)
        throw std::domain_error("neg_ln_bounds: argument must be in (0, 1]");
    RealBounds l = ln_bounds(q, prec);
    return RealBounds{-l.hi, -l.lo};
}

RealBounds extra_damping_bounds(const Rat& c, std::uint64_t n, long prec) {
    if (n < 16)
        throw std::domain_error("extra_damping_bounds: n must be >= 16");
    if (c <= 0)
        throw std::domain_error("extra_damping_bounds: c must be positive");
    // u = ln ln n >= ln ln 16 > 1, so u, ln u and c are all positive and
    // the exponent c * u * ln u is a product of positive enclosures.
    RealBounds u;
    {
        Mpfr t(prec);
        mpfr_set_ui(t, n, MPFR_RNDD);
        mpfr_log(t, t, MPFR_RNDD);
        mpfr_log(t, t, MPFR_RNDD);
        u.lo = mpfr_to_rat(t);
        mpfr_set_ui(t, n, MPFR_RNDU);
        mpfr_log(t, t, MPFR_RNDU);
        mpfr_log(t, t, MPFR_RNDU);
        u.hi = mpfr_to_rat(t);
    }
    if (u.lo <= 1)
        throw std::domain_error("extra_damping_bounds: ln ln n must exceed 1");
    RealBounds lnu;
    lnu.lo = ln_dir(u.lo, MPFR_RNDD, prec);
    lnu.hi = ln_dir(u.hi, MPFR_RNDU, prec);
    Rat g_lo = c * u.lo * lnu.lo;
    Rat g_hi = c * u.hi * lnu.hi;
    RealBounds out;
    out.lo = exp_dir_lo(g_lo, prec);
    out.hi = exp_dir_hi(g_hi, prec);
    return out;
}

bool below_exp_neg_e(const Rat& q) {
    if (q <= 0)
        throw std::domain_error("below_exp_neg_e: argument must be positive");
    if (q >= 1)
        return false;
    for (long prec = 64; prec <= kMaxPrec; prec *= 2) {
        // e^{-e}: exponent -e enclosed first, then directed exp.
        Rat e_lo = exp_dir_lo(Rat(1), prec);
        Rat e_hi = exp_dir_hi(Rat(1), prec);
        Rat t_lo = exp_dir_lo(-e_hi, prec);
        Rat t_hi = exp_dir_hi(-e_lo, prec);
        if (q < t_lo)
            return true;
        if (q >= t_hi)
            return false;
    }
    throw std::runtime_error("below_exp_neg_e: failed to certify at max precision");
}

RealBounds fc_core_bounds(const Rat& x, const Rat& c, long prec) {
    if (x <= 0 || x >= 1)
        throw std::domain_error("fc_core_bounds: x must be in (0, 1)");
    if (c <= 0)
        throw std::domain_error("fc_core_bounds: c must be positive");
    RealBounds u = neg_ln_bounds(x, prec); // u = -ln x
    if (u.lo <= 1)
        throw std::domain_error("fc_core_bounds: requires -ln x > 1 (x < e^{-e} expected)");
    RealBounds lnu;
    lnu.lo = ln_dir(u.lo, MPFR_RNDD, prec);
    lnu.hi = ln_dir(u.hi, MPFR_RNDU, prec);
    if (lnu.lo <= 0)
        throw std::domain_error("fc_core_bounds: requires ln(-ln x) > 0");
    RealBounds lnlnu;
    lnlnu.lo = ln_dir(lnu.lo, MPFR_RNDD, prec);
    lnlnu.hi = ln_dir(lnu.hi, MPFR_RNDU, prec);
    // Exponent g = c * ln u * ln ln u; the factors may have mixed signs when
    // ln ln u < 0 (x just below e^{-e}), so use interval products.
    RealBounds g = interval_mul(RealBounds{c, c}, interval_mul(lnu, lnlnu));
    RealBounds out;
    out.lo = x * exp_dir_lo(-g.hi, prec);
    out.hi = x * exp_dir_hi(-g.lo, prec);
    return out;
}

RealBounds hpv_core_bounds(const Rat& x, long prec) {
    if (x <= 0 || x >= 1)
        throw std::domain_error("hpv_core_bounds: x must be in (0, 1)");
    RealBounds lx = ln_bounds(x, prec); // both bounds negative
    RealBounds u{-lx.hi, -lx.lo};       // u = -ln x > 0
    RealBounds lnu;
    lnu.lo = ln_dir(u.lo, MPFR_RNDD, prec);
    lnu.hi = ln_dir(u.hi, MPFR_RNDU, prec);
    if (lnu.lo <= 0 && lnu.hi >= 0)
        throw std::domain_error("hpv_core_bounds: ln(-ln x) enclosure straddles 0 (x near 1/e)");
    // ratio = ln x / ln(-ln x): interval quotient via exact corner division.
    Rat c1 = lx.lo / lnu.lo;
    Rat c2 = lx.lo / lnu.hi;
    Rat c3 = lx.hi / lnu.lo;
    Rat c4 = lx.hi / lnu.hi;
    Rat r_lo = std::min(std::min(c1, c2), std::min(c3, c4));
    Rat r_hi = std::max(std::max(c1, c2), std::max(c3, c4));
    RealBounds out;
    out.lo = x * exp_dir_lo(r_lo, prec);
    out.hi = x * exp_dir_hi(r_hi, prec);
    return out;
}

DyadicSum::DyadicSum(long frac_bits) : frac_bits_(frac_bits) {
    if (frac_bits < 1) throw std::domain_error("DyadicSum needs at least one fractional bit");
}

void DyadicSum::add(const RealBounds& b) {
    if (b.lo > b.hi) throw std::domain_error("DyadicSum: inverted enclosure");
    Int t;
    mpz_mul_2exp(t.get_mpz_t(), mpq_numref(b.lo.get_mpq_t()), static_cast<unsigned long>(frac_bits_));
    mpz_fdiv_q(t.get_mpz_t(), t.get_mpz_t(), mpq_denref(b.lo.get_mpq_t()));
    lo_ += t;
    mpz_mul_2exp(t.get_mpz_t(), mpq_numref(b.hi.get_mpq_t()), static_cast<unsigned long>(frac_bits_));
    mpz_cdiv_q(t.get_mpz_t(), t.get_mpz_t(), mpq_denref(b.hi.get_mpq_t()));
    hi_ += t;
    ++terms_;
}

void DyadicSum::add_exact(const Rat& q) { add(RealBounds{q, q}); }

RealBounds DyadicSum::value() const {
    Rat unit(Int(1), Int(1) << static_cast<unsigned long>(frac_bits_));
    RealBounds out;
    out.lo = Rat(lo_) * unit;
    out.hi = Rat(hi_) * unit;
    return out;
}

} // namespace dslab
