#include <doctest.h>

#include "dslab/errors.hpp"
#include "dslab/overlap.hpp"

using namespace dslab;

TEST_SUITE("overlap") {

TEST_CASE("thresholds for (2,3) at psi = 1/2") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    CHECK(quantity_A(2, 3, half) == Rat(3));
    CHECK(quantity_D(2, 3, half) == make_rat(3, 2));
    CHECK(factor_P(2, 3, half) == Rat(3)); // both 2 and 3 exceed D = 3/2
    CHECK(quantity_A(3, 2, half) == Rat(3));
    CHECK_THROWS_AS(quantity_D(4, 4, half), std::domain_error);
}

TEST_CASE("thresholds for (8,20) at psi = 1/n") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    CHECK(quantity_A(8, 20, recip) == Rat(5));
    CHECK(quantity_D(8, 20, recip) == make_rat(5, 8));
    CHECK(factor_P(8, 20, recip) == make_rat(5, 2)); // (2/1)(5/4) over primes {2, 5}
}

TEST_CASE("sigma spot values") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    CHECK(count_sigma(2, 3, half, SigmaMethod::brute) == 2);
    CHECK(count_sigma(2, 3, half, SigmaMethod::fast) == 2);
    CHECK(count_sigma(3, 4, half, SigmaMethod::brute) == 2);
    CHECK(count_sigma(3, 4, half, SigmaMethod::fast) == 2);
    // order does not matter
    CHECK(count_sigma(20, 8, half, SigmaMethod::fast) ==
          count_sigma(8, 20, half, SigmaMethod::fast));
    // a < m and b < n leave nothing to count when either side is 1
    CHECK(count_sigma(1, 9, half, SigmaMethod::fast) == 0);
    CHECK(count_sigma(1, 9, half, SigmaMethod::brute) == 0);
}

TEST_CASE("fast sigma equals brute sigma") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    for (std::uint64_t m = 2; m <= 64; ++m) {
        for (std::uint64_t n = m + 1; n <= 64; ++n) {
            CHECK(count_sigma(m, n, half, SigmaMethod::fast) ==
                  count_sigma(m, n, half, SigmaMethod::brute));
            CHECK(count_sigma(m, n, recip, SigmaMethod::fast) ==
                  count_sigma(m, n, recip, SigmaMethod::brute));
        }
    }
}

TEST_CASE("fast sigma survives a larger threshold") {
    // psi = 3 makes A large enough that several multiples of gcd contribute
    auto big = PsiFunction::constant(Rat(3), Rat(1));
    for (std::uint64_t m = 2; m <= 40; ++m) {
        for (std::uint64_t n = m + 1; n <= 40; ++n) {
            CHECK(count_sigma(m, n, big, SigmaMethod::fast) ==
                  count_sigma(m, n, big, SigmaMethod::brute));
        }
    }
}

TEST_CASE("full pair statistics for (2,3) at psi = 1/2") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    PairStats s = pair_stats(2, 3, half);
    CHECK(s.m == 2);
    CHECK(s.n == 3);
    CHECK(s.lambda_m == make_rat(1, 2));
    CHECK(s.lambda_n == make_rat(2, 3));
    CHECK(s.lambda_inter == make_rat(1, 2));
    CHECK(s.A == Rat(3));
    CHECK(s.D == make_rat(3, 2));
    CHECK(s.P == Rat(3));
    CHECK(s.sigma == 2);
    CHECK(s.indep_rhs == Rat(1));
    CHECK(s.ratio == make_rat(1, 2));
}

TEST_CASE("intersection measure for (2,4) at psi = 1/2") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    PairStats s = pair_stats(2, 4, half);
    CHECK(s.lambda_inter == make_rat(1, 4));
    CHECK(s.sigma == 2);
    CHECK_THROWS_AS(pair_stats(5, 5, half), std::domain_error);
}

TEST_CASE("pairwise bounds hold on a sample range") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    for (std::uint64_t m = 16; m < 48; ++m) {
        for (std::uint64_t n = m + 1; n < 48; ++n) {
            PairStats s = pair_stats(m, n, recip);
            Rat pm = recip.evaluate(m), pn = recip.evaluate(n);
            CHECK(s.lambda_inter <= 8 * pm * pn);
            Rat min_len = pm / Rat(Int(m));
            if (pn / Rat(Int(n)) < min_len) min_len = pn / Rat(Int(n));
            CHECK(s.lambda_inter <= 2 * min_len * Rat(Int(s.sigma)));
            CHECK(s.P >= 1);
            CHECK(s.indep_rhs == s.lambda_m * s.lambda_n * s.P);
        }
    }
}

TEST_CASE("cached-set variant matches the direct one") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    ApproxSet e9 = build_E(9, recip);
    ApproxSet e14 = build_E(14, recip);
    PairStats direct = pair_stats(9, 14, recip);
    PairStats cached = pair_stats(9, 14, recip, e9, e14);
    CHECK(direct.lambda_inter == cached.lambda_inter);
    CHECK(direct.sigma == cached.sigma);
    CHECK(direct.ratio == cached.ratio);
}

TEST_CASE("oversized moduli are rejected rather than miscounted") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    CHECK_THROWS_AS(count_sigma(std::uint64_t(1) << 32, (std::uint64_t(1) << 32) + 1, half,
                                SigmaMethod::fast),
                    resource_error);
}

} // TEST_SUITE
