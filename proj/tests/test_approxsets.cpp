#include <doctest.h>

#include <cmath>

#include "dslab/approxsets.hpp"
#include "dslab/errors.hpp"
#include "dslab/numtheory.hpp"

using namespace dslab;

namespace {

Rat wrap_unit(Rat x) {
    x -= Rat(rat_floor(x));
    return x;
}

} // namespace

TEST_SUITE("approxsets") {

TEST_CASE("E_5 at psi = 1/4") {
    auto psi = PsiFunction::constant(make_rat(1, 4), Rat(1));
    ApproxSet e5 = build_E(5, psi);
    CHECK(e5.n == 5);
    CHECK(e5.psi_n == make_rat(1, 4));
    CHECK(e5.set.arc_count() == 4);
    CHECK(e5.set.measure() == make_rat(2, 5));
    CHECK(e5.set.contains(make_rat(1, 5)));
    CHECK(e5.set.contains(make_rat(4, 5)));
    CHECK_FALSE(e5.set.contains(make_rat(1, 2)));
}

TEST_CASE("E_1 wraps around zero") {
    auto psi = PsiFunction::constant(make_rat(1, 4), Rat(1));
    ApproxSet e1 = build_E(1, psi);
    CHECK(e1.set.arc_count() == 2);
    CHECK(e1.set.measure() == make_rat(1, 2));
    CHECK(e1.set.contains(make_rat(1, 8)));
    CHECK(e1.set.contains(make_rat(7, 8)));
    CHECK_FALSE(e1.set.contains(make_rat(1, 2)));
}

TEST_CASE("E_2 at psi = 1/2") {
    auto psi = PsiFunction::constant(make_rat(1, 2), Rat(1));
    ApproxSet e2 = build_E(2, psi);
    REQUIRE(e2.set.arc_count() == 1);
    CHECK(e2.set.arcs()[0] == Arc{make_rat(1, 4), make_rat(3, 4)});
}

TEST_CASE("vanishing psi gives the empty set and n = 0 throws") {
    auto psi = PsiFunction::from_table({{3, make_rat(1, 5)}}, Rat(1));
    CHECK(build_E(4, psi).set.empty());
    CHECK_THROWS_AS(build_E(0, psi), std::domain_error);
}

TEST_CASE("measure formula across both test families") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    for (std::uint64_t n = 1; n <= 500; ++n) {
        MeasureCheck a = measure_formula_check(n, half);
        CHECK(a.equal);
        CHECK(a.computed == a.formula);
        MeasureCheck b = measure_formula_check(n, recip);
        CHECK(b.equal);
    }
    // spot value: 2 psi phi / n at n = 12, psi = 1/2
    CHECK(measure_formula_check(12, half).formula == make_rat(1, 3));
}

TEST_CASE("reflection symmetry of each set") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    for (std::uint64_t n = 2; n <= 50; ++n) {
        ApproxSet e = build_E(n, recip);
        for (int k = 1; k < 101; ++k) {
            Rat x = make_rat(k, 101);
            CHECK(e.set.contains(x) == e.set.contains(wrap_unit(Rat(1) - x)));
        }
    }
}

TEST_CASE("truncated union by hand") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    auto u24 = truncated_union(recip, 2, 4);
    REQUIRE(u24.arc_count() == 1);
    CHECK(u24.arcs()[0] == Arc{make_rat(3, 16), make_rat(13, 16)});
    CHECK(u24.measure() == make_rat(5, 8));

    auto u25 = truncated_union(recip, 2, 5);
    REQUIRE(u25.arc_count() == 1);
    CHECK(u25.measure() == make_rat(17, 25));

    // E_1 at psi(1) = 1 already covers everything but the point 0
    CHECK(truncated_union(recip, 1, 10).measure() == Rat(1));
}

TEST_CASE("union grows monotonically") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    Rat prev;
    for (std::uint64_t to = 2; to <= 40; ++to) {
        Rat cur = truncated_union(recip, 2, to).measure();
        CHECK(cur >= prev);
        prev = cur;
    }
    CHECK(prev < 1);
}

TEST_CASE("arc budget is enforced") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    CHECK_THROWS_AS(truncated_union(half, 1, 100000, 100), resource_error);
}

TEST_CASE("monte carlo agrees with the exact measure") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    MonteCarloEstimate est = montecarlo_union_measure(half, 2, 2, 50000, 1);
    CHECK(est.samples == 50000);
    CHECK(est.hits > 0);
    // E_2 has measure exactly 1/2; 0.02 is about nine standard errors
    CHECK(std::abs(est.estimate - 0.5) < 0.02);

    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    double exact = truncated_union(recip, 2, 5).measure().get_d();
    MonteCarloEstimate u = montecarlo_union_measure(recip, 2, 5, 50000, 7);
    CHECK(std::abs(u.estimate - exact) < 0.02);

    // same seed, same estimate; the sampler is part of the contract
    MonteCarloEstimate again = montecarlo_union_measure(recip, 2, 5, 50000, 7);
    CHECK(u.hits == again.hits);
    CHECK(u.estimate == again.estimate);
}

TEST_CASE("monte carlo handles empty configurations") {
    auto none = PsiFunction::from_table({}, Rat(1));
    MonteCarloEstimate est = montecarlo_union_measure(none, 2, 10, 1000, 3);
    CHECK(est.hits == 0);
    CHECK(est.estimate == 0.0);
}

} // TEST_SUITE
