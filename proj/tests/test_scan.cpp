#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>

#include "dslab/errors.hpp"
#include "dslab/scan.hpp"

using namespace dslab;

namespace {

ScanSpec range_spec(std::uint64_t lo, std::uint64_t hi) {
    ScanSpec spec;
    spec.min = lo;
    spec.max = hi;
    return spec;
}

} // namespace

TEST_SUITE("scan") {

TEST_CASE("single-pair scan reproduces the hand row") {
    auto half = PsiFunction::constant(make_rat(1, 2), Rat(1));
    ScanResult res = run_scan(range_spec(2, 3), half);
    REQUIRE(res.rows.size() == 1);
    const PairStats& row = res.rows[0];
    CHECK(row.m == 2);
    CHECK(row.n == 3);
    CHECK(row.lambda_m == make_rat(1, 2));
    CHECK(row.lambda_n == make_rat(2, 3));
    CHECK(row.lambda_inter == make_rat(1, 2));
    CHECK(row.A == Rat(3));
    CHECK(row.D == make_rat(3, 2));
    CHECK(row.P == Rat(3));
    CHECK(row.sigma == 2);
    CHECK(row.indep_rhs == Rat(1));
    CHECK(row.ratio == make_rat(1, 2));

    CHECK(res.summary.pairs == 1);
    CHECK(res.summary.sum_inter == make_rat(1, 2));
    CHECK(res.summary.sum_product == make_rat(1, 3));
    CHECK(res.summary.max_ratio == make_rat(1, 2));
    CHECK(res.summary.argmax_m == 2);
    CHECK(res.summary.argmax_n == 3);
    CHECK(res.summary.trouble_pairs == 0);
    CHECK(res.summary.trouble_mass == Rat());
}

TEST_CASE("trouble window catches a small threshold over a long modulus") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    ScanResult res = run_scan(range_spec(100, 101), recip);
    REQUIRE(res.rows.size() == 1);
    // A/gcd = 101/50 sits in [1, ln 10100)
    CHECK(res.summary.trouble_pairs == 1);
    CHECK(res.summary.trouble_mass == make_rat(8, 51005));
    CHECK(res.summary.sum_product == make_rat(8, 51005));
}

TEST_CASE("empty range produces an empty result") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    ScanResult res = run_scan(range_spec(5, 4), recip);
    CHECK(res.rows.empty());
    CHECK(res.summary.pairs == 0);
    CHECK(res.summary.sum_inter == Rat());
    CHECK(res.summary.sum_product == Rat());
    CHECK(res.summary.max_ratio == Rat());
    CHECK(res.summary.argmax_m == 0);
    CHECK(rows_to_csv(res.rows) ==
          "m,n,lambda_m,lambda_n,lambda_inter,A,D,P,Sigma,indep_rhs,ratio\n");
}

TEST_CASE("worker count never changes the bytes") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    ScanSpec spec = range_spec(16, 64);
    spec.workers = 1;
    ScanResult one = run_scan(spec, recip);
    spec.workers = 4;
    ScanResult four = run_scan(spec, recip);
    CHECK(rows_to_csv(one.rows) == rows_to_csv(four.rows));
    CHECK(result_to_json(one) == result_to_json(four));
}

TEST_CASE("sampling is reproducible and seed-sensitive") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    ScanSpec spec = range_spec(2, 100);
    spec.filter = PairFilter::sampled;
    spec.sample_count = 50;
    spec.seed = 42;
    ScanResult a = run_scan(spec, recip);
    ScanResult b = run_scan(spec, recip);
    CHECK(a.rows.size() == 50);
    CHECK(rows_to_csv(a.rows) == rows_to_csv(b.rows));
    spec.workers = 3; // the draw happens before the pair list is split up
    ScanResult c = run_scan(spec, recip);
    CHECK(rows_to_csv(a.rows) == rows_to_csv(c.rows));
    spec.workers = 1;
    spec.seed = 43;
    ScanResult d = run_scan(spec, recip);
    CHECK(rows_to_csv(a.rows) != rows_to_csv(d.rows));
}

TEST_CASE("oversampling degrades to the full pair list") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    ScanSpec sampled = range_spec(2, 5);
    sampled.filter = PairFilter::sampled;
    sampled.sample_count = 100; // only 6 unordered pairs exist
    sampled.seed = 7;
    ScanResult s = run_scan(sampled, recip);
    ScanResult full = run_scan(range_spec(2, 5), recip);
    CHECK(s.rows.size() == 6);
    CHECK(rows_to_csv(s.rows) == rows_to_csv(full.rows));
}

TEST_CASE("block filters split the pair set at a tower boundary") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    ScanSpec spec = range_spec(10, 20); // 16 starts a new block
    ScanResult all = run_scan(spec, recip);
    spec.filter = PairFilter::cross_block;
    ScanResult cross = run_scan(spec, recip);
    spec.filter = PairFilter::within_block;
    ScanResult within = run_scan(spec, recip);
    CHECK(all.rows.size() == 55);
    CHECK(cross.rows.size() == 30);
    CHECK(within.rows.size() == 25);
    CHECK(cross.summary.sum_product + within.summary.sum_product ==
          all.summary.sum_product);
    for (const auto& row : cross.rows) CHECK(((row.m < 16) != (row.n < 16)));
    for (const auto& row : within.rows) CHECK(((row.m < 16) == (row.n < 16)));
}

TEST_CASE("block selector walks one tower block") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    ScanSpec spec;
    spec.h = 0; // members 2..15
    ScanResult res = run_scan(spec, recip);
    CHECK(res.rows.size() == 91);
    CHECK(res.rows.front().m == 2);
    CHECK(res.rows.back().n == 15);
    spec.cap = 5;
    ScanResult capped = run_scan(spec, recip);
    CHECK(capped.rows.size() == 6);
}

TEST_CASE("selector misuse is a domain error") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    ScanSpec none;
    CHECK_THROWS_AS(run_scan(none, recip), std::domain_error);
    ScanSpec both = range_spec(2, 10);
    both.h = 0;
    CHECK_THROWS_AS(run_scan(both, recip), std::domain_error);
    ScanSpec zero = range_spec(0, 10);
    CHECK_THROWS_AS(run_scan(zero, recip), std::domain_error);
}

TEST_CASE("budgets stop oversized requests") {
    auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
    ScanSpec spec = range_spec(2, 50);
    spec.pair_budget = 10;
    CHECK_THROWS_AS(run_scan(spec, recip), resource_error);
    ScanSpec arcs = range_spec(2, 20);
    arcs.arc_budget = 10;
    CHECK_THROWS_AS(run_scan(arcs, recip), resource_error);
}

TEST_CASE("golden record round-trips through JSON") {
    GoldenRecord rec;
    rec.max_pair_ratio = make_rat(1, 2);
    rec.max_cross_block_p = make_rat(5, 2);
    rec.max_mertens_ratio = make_rat(3, 4);
    rec.exceptional_mass_ratio = make_rat(1, 8);
    GoldenRecord back = parse_golden(golden_to_json(rec));
    CHECK(back.max_pair_ratio == rec.max_pair_ratio);
    CHECK(back.max_cross_block_p == rec.max_cross_block_p);
    CHECK(back.max_mertens_ratio == rec.max_mertens_ratio);
    CHECK(back.exceptional_mass_ratio == rec.exceptional_mass_ratio);
    CHECK(diff_golden(rec, back).empty());

    GoldenRecord bumped = rec;
    bumped.max_mertens_ratio += make_rat(1, 1000);
    auto diffs = diff_golden(rec, bumped);
    REQUIRE(diffs.size() == 1);
    CHECK(diffs[0].name == "max_mertens_ratio");
    CHECK(diffs[0].stored == rec.max_mertens_ratio);
    CHECK(diffs[0].fresh == bumped.max_mertens_ratio);
}

TEST_CASE("golden parsing rejects damaged documents") {
    CHECK_THROWS_AS(parse_golden("not json"), parse_error);
    CHECK_THROWS_AS(parse_golden("{}"), parse_error);
    CHECK_THROWS_AS(load_golden_file("no_such_golden.json"), resource_error);
}

TEST_CASE("path overload loads the function and applies a damping override") {
    const char* path = "scan_psi_tmp.json";
    {
        auto recip = PsiFunction::reciprocal(Rat(1), Rat(1));
        std::ofstream out(path);
        out << recip.serialize();
    }
    ScanSpec spec = range_spec(2, 10);
    spec.psi_path = path;
    spec.c_override = Rat(3);
    ScanResult loaded = run_scan(spec);
    ScanResult direct = run_scan(spec, PsiFunction::reciprocal(Rat(1), Rat(3)));
    CHECK(rows_to_csv(loaded.rows) == rows_to_csv(direct.rows));
    std::remove(path);

    ScanSpec missing = range_spec(2, 10);
    missing.psi_path = "no_such_psi.json";
    CHECK_THROWS_AS(run_scan(missing), resource_error);

    const char* garbage = "scan_psi_garbage.json";
    {
        std::ofstream out(garbage);
        out << "not a document";
    }
    ScanSpec bad = range_spec(2, 10);
    bad.psi_path = garbage;
    CHECK_THROWS_AS(run_scan(bad), parse_error);
    std::remove(garbage);
}

} // TEST_SUITE
