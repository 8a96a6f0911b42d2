#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "dslab/errors.hpp"
#include "dslab/psifun.hpp"

using namespace dslab;

TEST_SUITE("psifun") {

TEST_CASE("parametric families evaluate") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    CHECK(half.evaluate(1) == make_rat(1, 2));
    CHECK(half.evaluate(7) == make_rat(1, 2));
    CHECK(half.c() == Rat(1));

    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    CHECK(recip.evaluate(1) == Rat(1));
    CHECK(recip.evaluate(20) == make_rat(1, 20));

    // q / (n ceil(log2 n)), with the log factor clamped to 1 at n <= 2
    auto damped = PsiFunction::log_damped(Rat(1), Rat(1));
    CHECK(damped.evaluate(1) == Rat(1));
    CHECK(damped.evaluate(2) == make_rat(1, 2));
    CHECK(damped.evaluate(8) == make_rat(1, 24));
    CHECK(damped.evaluate(9) == make_rat(1, 36));
    CHECK_THROWS_AS(damped.evaluate(0), std::domain_error);
}

TEST_CASE("table lookup")
{
    auto psi = PsiFunction::from_table({{3, make_rat(1, 7)}, {10, make_rat(1, 2)}}, Rat(1));
    CHECK(psi.is_table());
    CHECK(psi.evaluate(3) == make_rat(1, 7));
    CHECK(psi.evaluate(10) == make_rat(1, 2));
    CHECK(psi.evaluate(4) == Rat());
    CHECK(psi.evaluate(11) == Rat());
}

TEST_CASE("parity restriction follows the tower blocks") {
    // default tower blocks: [2,16) even, [16,256) odd, [256,65536) even
    auto psi = PsiFunction::constant(make_rat(1, 3), Rat(1));
    auto even = psi.restricted_to_parity(PsiFunction::Parity::even);
    CHECK(even.evaluate(15) == make_rat(1, 3));
    CHECK(even.evaluate(20) == Rat());
    CHECK(even.evaluate(300) == make_rat(1, 3));
    CHECK(even.evaluate(1) == Rat()); // below the first block
    auto odd = psi.restricted_to_parity(PsiFunction::Parity::odd);
    // the filters partition everything from the first block on
    for (std::uint64_t n = 2; n <= 300; ++n)
        CHECK(even.evaluate(n) + odd.evaluate(n) == psi.evaluate(n));
}

TEST_CASE("parity filter accessors") {
    auto psi = PsiFunction::reciprocal(Rat(1), Rat(1));
    CHECK_FALSE(psi.parity_filter().has_value());
    auto even = psi.restricted_to_parity(PsiFunction::Parity::even);
    REQUIRE(even.parity_filter().has_value());
    CHECK(*even.parity_filter() == PsiFunction::Parity::even);
    auto lifted = even.without_parity();
    CHECK_FALSE(lifted.parity_filter().has_value());
    CHECK(lifted.evaluate(20) == make_rat(1, 20));
    // conflicting parity restrictions give the zero function
    auto zero = even.restricted_to_parity(PsiFunction::Parity::odd);
    CHECK(zero.evaluate(15) == Rat());
}

TEST_CASE("range restriction is inclusive and composes") {
    auto psi = PsiFunction::constant(make_rat(1, 4), Rat(1)).restricted_to_range(10, 20);
    CHECK(psi.evaluate(9) == Rat());
    CHECK(psi.evaluate(10) == make_rat(1, 4));
    CHECK(psi.evaluate(20) == make_rat(1, 4));
    CHECK(psi.evaluate(21) == Rat());
    auto narrowed = psi.restricted_to_range(15, 40);
    CHECK(narrowed.evaluate(14) == Rat());
    CHECK(narrowed.evaluate(15) == make_rat(1, 4));
    CHECK(narrowed.evaluate(20) == make_rat(1, 4));
    CHECK(narrowed.evaluate(21) == Rat());
    auto empty = psi.restricted_to_range(30, 40);
    CHECK(empty.evaluate(35) == Rat());
    CHECK_THROWS_AS(psi.restricted_to_range(0, 5), std::domain_error);
}

TEST_CASE("scaling multiplies pointwise") {
    auto psi = PsiFunction::reciprocal(Rat(1), make_rat(3, 2)).scaled(make_rat(1, 4));
    CHECK(psi.evaluate(8) == make_rat(1, 32));
    CHECK(psi.c() == make_rat(3, 2)); // damping constant untouched
    CHECK_THROWS_AS(psi.scaled(make_rat(-1, 2)), std::domain_error);
    auto table = PsiFunction::from_table({{5, make_rat(1, 2)}}, Rat(1)).scaled(make_rat(1, 3));
    CHECK(table.evaluate(5) == make_rat(1, 6));
}

TEST_CASE("with_c replaces only the constant") {
    auto psi = PsiFunction::reciprocal(Rat(1), Rat(1)).with_c(make_rat(7, 3));
    CHECK(psi.c() == make_rat(7, 3));
    CHECK(psi.evaluate(5) == make_rat(1, 5));
    CHECK_THROWS_AS(psi.with_c(Rat()), std::domain_error);
}

TEST_CASE("normalization report") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    CHECK(recip.validate_normalization(2, 100).empty());
    auto at_one = recip.validate_normalization(1, 100);
    REQUIRE(at_one.size() == 1);
    CHECK(at_one[0].n == 1);
    CHECK(at_one[0].above_half); // psi(1) = 1 > 1/2

    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    auto below = half.validate_normalization(1, 10);
    REQUIRE(below.size() == 1); // 1/2 * 1 < 1 only at n = 1
    CHECK(below[0].n == 1);
    CHECK_FALSE(below[0].above_half);

    auto tiny = PsiFunction::constant(make_rat(1, 100), Rat(1));
    CHECK(tiny.validate_normalization(2, 50).size() == 49); // below 1/n everywhere up to 99
}

TEST_CASE("document round-trip for families and tables") {
    auto recip = PsiFunction::reciprocal(make_rat(1, 2), make_rat(2, 1));
    auto back = PsiFunction::load(recip.serialize());
    CHECK(back.evaluate(10) == make_rat(1, 20));
    CHECK(back.c() == Rat(2));

    auto table = PsiFunction::from_table({{4, make_rat(1, 9)}, {100, make_rat(1, 3)}}, Rat(1));
    auto table_back = PsiFunction::load(table.serialize());
    CHECK(table_back.evaluate(4) == make_rat(1, 9));
    CHECK(table_back.evaluate(100) == make_rat(1, 3));
    CHECK(table_back.evaluate(5) == Rat());

    auto ranged = recip.restricted_to_range(10, 20);
    auto ranged_back = PsiFunction::load(ranged.serialize());
    CHECK(ranged_back.evaluate(9) == Rat());
    CHECK(ranged_back.evaluate(15) == make_rat(1, 30));

    auto parity = recip.restricted_to_parity(PsiFunction::Parity::even);
    auto parity_back = PsiFunction::load(parity.serialize());
    CHECK(parity_back.evaluate(20) == Rat());
    CHECK(parity_back.evaluate(15) == make_rat(1, 30));

    // one support filter fits the document form, two do not
    CHECK_THROWS_AS(parity.restricted_to_range(10, 20).serialize(), std::domain_error);
}

TEST_CASE("malformed documents carry a location") {
    auto loc = [](const std::string& text) {
        try {
            PsiFunction::load(text);
        } catch (const parse_error& e) {
            return e.location();
        }
        return std::string("no error");
    };
    CHECK(loc("not json") == "$");
    CHECK(loc(R"({"family":"constant","q":"1/2"})") == "/c");
    CHECK(loc(R"({"family":"constant","q":"1/2","c":"0"})") == "/c");
    CHECK(loc(R"({"family":"cubic","q":"1/2","c":"1"})") == "/family");
    CHECK(loc(R"({"family":"constant","q":"-1/2","c":"1"})") == "/q");
    CHECK(loc(R"({"c":"1"})") == "$");
    CHECK(loc(R"({"family":"constant","q":"1/2","table":{},"c":"1"})") == "$");
    CHECK(loc(R"({"table":{"0":"1/2"},"c":"1"})") == "/table/0");
    CHECK(loc(R"({"table":{"5":"1/0"},"c":"1"})") == "/table/5");
    CHECK(loc(R"({"family":"constant","q":"1/2","c":"1","support":"weekends"})") == "/support");
    CHECK(loc(R"({"family":"constant","q":"1/2","c":"1","support":{"min":5}})") == "/support");
    CHECK(loc(R"({"family":"constant","q":"1/2","c":"1","support":{"min":9,"max":4}})") ==
          "/support");
}

TEST_CASE("file loading") {
    const char* path = "psi_test_roundtrip.json";
    {
        std::ofstream out(path);
        out << PsiFunction::reciprocal(Rat(1), Rat(1)).serialize();
    }
    auto psi = PsiFunction::load_file(path);
    CHECK(psi.evaluate(42) == make_rat(1, 42));
    std::remove(path);
    CHECK_THROWS_AS(PsiFunction::load_file("does_not_exist_anywhere.json"), resource_error);
}

TEST_CASE("custom tower changes the parity blocks") {
    // mini tower 2, 4, 16, 256: [2,4) even, [4,16) odd, [16,256) even
    auto psi = PsiFunction::constant(make_rat(1, 5), Rat(1));
    psi.attach_tower(std::make_shared<const BlockTower>(2, 2));
    auto even = psi.restricted_to_parity(PsiFunction::Parity::even);
    CHECK(even.evaluate(3) == make_rat(1, 5));
    CHECK(even.evaluate(8) == Rat());
    CHECK(even.evaluate(20) == make_rat(1, 5));
}

} // TEST_SUITE
