#include <doctest.h>

#include <cmath>

#include "dslab/approxsets.hpp"
#include "dslab/errors.hpp"
#include "dslab/numtheory.hpp"
#include "dslab/seriesmoment.hpp"

using namespace dslab;

TEST_SUITE("seriesmoment") {

TEST_CASE("damping transform endpoints and clamps") {
    CHECK(fc_eval(0.0, 1.0) == 0.0);
    CHECK(fc_eval(-0.5, 1.0) == 0.0);
    CHECK(fc_eval(1.0, 1.0) == 1.0);
    CHECK(fc_eval(2.0, 1.0) == 1.0);
    // identity on [e^{-e}, 1): the exponent would amplify there
    CHECK(fc_eval(0.5, 1.0) == 0.5);
    CHECK(fc_eval(0.07, 1.0) == 0.07);
    // strictly damped below e^{-e}
    CHECK(fc_eval(0.01, 1.0) < 0.01);
    CHECK(fc_eval(0.01, 1.0) > 0.0);
    // at x = e^{-e^e} the two nested logs collapse to exp(-c)
    double x = std::exp(-std::exp(std::exp(1.0)));
    CHECK(fc_eval(x, 1.0) == doctest::Approx(x * std::exp(-std::exp(1.0))).epsilon(1e-12));
    // doubling c doubles the damping exponent
    CHECK(fc_eval(x, 2.0) == doctest::Approx(x * std::exp(-2 * std::exp(1.0))).epsilon(1e-12));
}

TEST_CASE("reference transform with the single log") {
    CHECK(hpv_f_eval(0.0) == 0.0);
    CHECK(hpv_f_eval(1.5) == 1.0);
    CHECK(hpv_f_eval(0.5) == 0.5); // identity on [1/e, 1)
    CHECK(hpv_f_eval(0.2) < 0.2);
    CHECK(hpv_f_eval(0.2) > 0.0);
}

TEST_CASE("certified enclosures of the damping transform") {
    CHECK(fc_bounds(Rat(), Rat(1)).lo == Rat());
    CHECK(fc_bounds(Rat(), Rat(1)).hi == Rat());
    CHECK(fc_bounds(Rat(2), Rat(1)).lo == Rat(1));
    CHECK(fc_bounds(make_rat(1, 2), Rat(1)).lo == make_rat(1, 2)); // clamp region is exact
    CHECK(fc_bounds(make_rat(1, 2), Rat(1)).hi == make_rat(1, 2));

    Rat x = make_rat(1, 100);
    RealBounds b = fc_bounds(x, Rat(1));
    CHECK(b.lo <= b.hi);
    CHECK(b.lo > 0);
    CHECK(b.hi < x);
    // the double evaluation lands inside the enclosure, give or take rounding
    double mid = fc_eval(0.01, 1.0);
    CHECK(b.lo.get_d() <= mid + 1e-12);
    CHECK(b.hi.get_d() >= mid - 1e-12);
}

TEST_CASE("series report against a direct loop") {
    auto psi = PsiFunction::reciprocal(make_rat(1, 2), Rat(1));
    SeriesReport rep = series_report(psi, 200);
    Rat plain;
    for (std::uint64_t n = 1; n <= 200; ++n)
        plain += psi.evaluate(n) * Rat(euler_phi(n)) / Rat(Int(n));
    CHECK(rep.partial_plain == plain);
    CHECK(rep.N == 200);
    CHECK(rep.partial_extra.lo <= rep.partial_extra.hi);
    CHECK(rep.partial_extra.hi <= rep.partial_plain);
    CHECK(rep.partial_fc.hi <= rep.partial_plain);
    CHECK(rep.partial_fc.lo > 0);
}

TEST_CASE("checkpoints are the doubling sequence and grow monotonically") {
    auto psi = PsiFunction::reciprocal(make_rat(1, 2), Rat(1));
    SeriesReport rep = series_report(psi, 100);
    REQUIRE(rep.checkpoints.size() == 4); // 16, 32, 64, 100
    CHECK(rep.checkpoints[0].N == 16);
    CHECK(rep.checkpoints[1].N == 32);
    CHECK(rep.checkpoints[2].N == 64);
    CHECK(rep.checkpoints[3].N == 100);
    for (std::size_t i = 1; i < rep.checkpoints.size(); ++i) {
        CHECK(rep.checkpoints[i].partial_plain >= rep.checkpoints[i - 1].partial_plain);
        CHECK(rep.checkpoints[i].partial_extra.lo >= rep.checkpoints[i - 1].partial_extra.lo);
    }
    CHECK(rep.checkpoints.back().partial_plain == rep.partial_plain);
    for (const auto& cp : rep.checkpoints) CHECK(cp.partial_extra.hi <= cp.partial_plain);
}

TEST_CASE("explicit checkpoints are honored") {
    auto psi = PsiFunction::reciprocal(make_rat(1, 2), Rat(1));
    SeriesReport rep = series_report(psi, 50, {20, 40});
    REQUIRE(rep.checkpoints.size() == 3); // 20, 40, plus the final 50
    CHECK(rep.checkpoints[0].N == 20);
    CHECK(rep.checkpoints[2].N == 50);
    CHECK_THROWS_AS(series_report(psi, 50, {0, 20}), std::domain_error);
}

TEST_CASE("series cutoff below the damped range is rejected") {
    auto psi = PsiFunction::reciprocal(make_rat(1, 2), Rat(1));
    CHECK_THROWS_AS(series_report(psi, 15), std::domain_error);
    CHECK(series_report(psi, 16).N == 16);
}

TEST_CASE("second moment hand case on two moduli") {
    auto psi = PsiFunction::from_table({{2, make_rat(1, 2)}, {3, make_rat(1, 2)}}, Rat(1));
    MomentBound mb = second_moment_bound(psi, 3);
    // lambda_2 = 1/2, lambda_3 = 2/3: numerator (7/6)^2, denominator 7/6 + 2 * 1/2
    CHECK(mb.numerator == make_rat(49, 36));
    CHECK(mb.denominator == make_rat(13, 6));
    CHECK(mb.bound == make_rat(49, 78));
    CHECK(mb.union_measure == make_rat(2, 3));
    CHECK(mb.bound <= mb.union_measure);
}

TEST_CASE("second moment stays below the union measure") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    for (std::uint64_t n : {8, 32}) {
        MomentBound a = second_moment_bound(half, n);
        CHECK(a.bound > 0);
        CHECK(a.bound <= a.union_measure);
        MomentBound b = second_moment_bound(recip, n);
        CHECK(b.bound > 0);
        CHECK(b.bound <= b.union_measure);
    }
}

TEST_CASE("second moment respects its pair budget") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    CHECK_THROWS_AS(second_moment_bound(half, 10000, 10), resource_error);
    CHECK_THROWS_AS(second_moment_bound(half, 0), std::domain_error);
}

} // TEST_SUITE
