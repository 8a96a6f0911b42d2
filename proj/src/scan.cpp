#include "dslab/scan.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dslab/approxsets.hpp"
#include "dslab/certified.hpp"
#include "dslab/errors.hpp"
#include "dslab/numtheory.hpp"
#include "dslab/parallel.hpp"

namespace dslab {

namespace {

using nlohmann::json;

struct Member {
    std::uint64_t n = 0;
    int block = -1; // tower block index, -1 below the first block
};

// Strict x < ln(mn), decided by escalating the enclosure. The logarithm of
// an integer above 1 is irrational, so the enclosure always separates.
bool below_ln_of_product(const Rat& x, std::uint64_t m, std::uint64_t n) {
    Rat prod(Int(m) * Int(n));
    if (prod <= 1) return false;
    for (long prec = 96;; prec *= 2) {
        RealBounds b = ln_bounds(prod, prec);
        if (x < b.lo) return true;
        if (x >= b.hi) return false;
        if (prec >= (1l << 14))
            throw resource_error("log comparison failed to separate at maximum precision");
    }
}

void check_pair_budget(std::uint64_t pairs, std::uint64_t budget) {
    if (pairs > budget)
        throw resource_error("pair budget " + std::to_string(budget) + " exceeded (" +
                             std::to_string(pairs) + " pairs; raise with --pairs-budget)");
}

std::uint64_t unordered_pair_count(std::uint64_t t) {
    return t < 2 ? 0 : (t % 2 == 0 ? t / 2 * (t - 1) : (t - 1) / 2 * t);
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> sampled_pairs(std::uint64_t t,
                                                                   std::uint64_t count,
                                                                   std::uint64_t seed) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    std::uint64_t total = unordered_pair_count(t);
    if (total == 0 || count == 0) return out;
    if (count > total) count = total;

    std::mt19937_64 gen(seed);
    auto draw = [&gen](std::uint64_t bound) {
        unsigned bits = std::bit_width(bound - 1);
        std::uint64_t mask = bits >= 64 ? ~0ull : (1ull << bits) - 1;
        for (;;) {
            std::uint64_t r = gen() & mask;
            if (r < bound) return r;
        }
    };

    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    while (seen.size() < count) {
        std::uint64_t a = draw(t);
        std::uint64_t b = draw(t);
        if (a == b) continue;
        seen.emplace(std::min(a, b), std::max(a, b));
    }
    out.assign(seen.begin(), seen.end());
    return out;
}

} // namespace

ScanResult run_scan(const ScanSpec& spec, const PsiFunction& psi) {
    std::uint64_t lo = 0, hi = 0;
    if (spec.h) {
        if (spec.min || spec.max)
            throw std::domain_error("give either a block or an explicit range, not both");
        const BlockTower& tower = psi.tower();
        const Int& bl = tower.lower(*spec.h);
        const Int& bh = tower.lower(*spec.h + 1);
        if (!bl.fits_ulong_p()) throw resource_error("block lower bound does not fit a machine word");
        lo = bl.get_ui();
        hi = bh.fits_ulong_p() ? bh.get_ui() - 1 : std::uint64_t(-1);
        if (spec.cap) hi = std::min(hi, *spec.cap);
    } else if (spec.min && spec.max) {
        lo = *spec.min;
        hi = *spec.max;
        if (lo == 0) throw std::domain_error("range starts at 1");
    } else {
        throw std::domain_error("a scan needs --min/--max or --h");
    }

    ScanResult result;
    if (hi < lo) return result; // empty range, zero summary

    std::uint64_t t = hi - lo + 1;
    if (spec.filter == PairFilter::sampled) {
        check_pair_budget(std::min(spec.sample_count, unordered_pair_count(t)), spec.pair_budget);
    } else {
        check_pair_budget(unordered_pair_count(t), spec.pair_budget);
    }

    const BlockTower& tower = psi.tower();
    std::vector<Member> members(t);
    for (std::uint64_t i = 0; i < t; ++i) {
        members[i].n = lo + i;
        auto b = tower.block_index(lo + i);
        members[i].block = b ? static_cast<int>(*b) : -1;
    }

    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs; // member indices, i < j
    if (spec.filter == PairFilter::sampled) {
        pairs = sampled_pairs(t, spec.sample_count, spec.seed);
    } else {
        for (std::uint64_t i = 0; i < t; ++i) {
            for (std::uint64_t j = i + 1; j < t; ++j) {
                if (spec.filter == PairFilter::cross_block &&
                    (members[i].block < 0 || members[j].block < 0 ||
                     members[i].block == members[j].block))
                    continue;
                if (spec.filter == PairFilter::within_block &&
                    (members[i].block < 0 || members[i].block != members[j].block))
                    continue;
                pairs.emplace_back(i, j);
            }
        }
    }

    // Arc sets only for members that some pair touches; the budget guards
    // the total arc count before anything is built.
    std::vector<char> needed(t, 0);
    for (const auto& [i, j] : pairs) needed[i] = needed[j] = 1;
    std::uint64_t arcs = 0;
    for (std::uint64_t i = 0; i < t; ++i) {
        if (!needed[i]) continue;
        if (psi.evaluate(members[i].n) == 0) continue;
        arcs += euler_phi(members[i].n);
        if (arcs > spec.arc_budget)
            throw resource_error("arc budget " + std::to_string(spec.arc_budget) +
                                 " exceeded (raise with --arc-budget)");
    }
    std::vector<ApproxSet> sets(t);
    for (std::uint64_t i = 0; i < t; ++i)
        if (needed[i]) sets[i] = build_E(members[i].n, psi);

    struct State {
        std::vector<PairStats> rows;
        PairwiseSum inter, product, trouble;
        std::uint64_t trouble_pairs = 0;
        ArgMax max;
    };
    auto states = parallel_chunks<State>(
        pairs.size(), spec.workers, [&](State& st, std::uint64_t begin, std::uint64_t end) {
            for (std::uint64_t k = begin; k < end; ++k) {
                const auto& [i, j] = pairs[k];
                PairStats row = pair_stats(members[i].n, members[j].n, psi, sets[i], sets[j]);
                st.inter.add(row.lambda_inter);
                Rat prod = row.lambda_m * row.lambda_n;
                st.product.add(prod);
                if (row.A > 0) {
                    Rat over_gcd = row.A / Rat(std::gcd(row.m, row.n));
                    if (over_gcd >= 1 && below_ln_of_product(over_gcd, row.m, row.n)) {
                        ++st.trouble_pairs;
                        st.trouble.add(std::move(prod));
                    }
                }
                if (row.indep_rhs > 0) st.max.offer(row.ratio, row.m, row.n);
                st.rows.push_back(std::move(row));
            }
        });

    ArgMax merged;
    for (auto& st : states) {
        result.summary.pairs += st.rows.size();
        result.summary.sum_inter += st.inter.total();
        result.summary.sum_product += st.product.total();
        result.summary.trouble_pairs += st.trouble_pairs;
        result.summary.trouble_mass += st.trouble.total();
        merged.merge(st.max);
        std::move(st.rows.begin(), st.rows.end(), std::back_inserter(result.rows));
    }
    if (merged.set) {
        result.summary.max_ratio = merged.value;
        result.summary.argmax_m = merged.m;
        result.summary.argmax_n = merged.n;
    }
    std::sort(result.rows.begin(), result.rows.end(),
              [](const PairStats& a, const PairStats& b) {
                  return a.m != b.m ? a.m < b.m : a.n < b.n;
              });
    return result;
}

ScanResult run_scan(const ScanSpec& spec) {
    PsiFunction psi = PsiFunction::load_file(spec.psi_path);
    if (spec.c_override) psi = psi.with_c(*spec.c_override);
    return run_scan(spec, psi);
}

std::string rows_to_csv(const std::vector<PairStats>& rows) {
    std::ostringstream out;
    out << "m,n,lambda_m,lambda_n,lambda_inter,A,D,P,Sigma,indep_rhs,ratio\n";
    for (const auto& r : rows) {
        out << r.m << ',' << r.n << ',' << format_rational(r.lambda_m) << ','
            << format_rational(r.lambda_n) << ',' << format_rational(r.lambda_inter) << ','
            << format_rational(r.A) << ',' << format_rational(r.D) << ',' << format_rational(r.P)
            << ',' << r.sigma << ',' << format_rational(r.indep_rhs) << ','
            << format_rational(r.ratio) << '\n';
    }
    return out.str();
}

std::string result_to_json(const ScanResult& result) {
    json rows = json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"m", r.m},
                        {"n", r.n},
                        {"lambda_m", format_rational(r.lambda_m)},
                        {"lambda_n", format_rational(r.lambda_n)},
                        {"lambda_inter", format_rational(r.lambda_inter)},
                        {"A", format_rational(r.A)},
                        {"D", format_rational(r.D)},
                        {"P", format_rational(r.P)},
                        {"Sigma", r.sigma},
                        {"indep_rhs", format_rational(r.indep_rhs)},
                        {"ratio", format_rational(r.ratio)}});
    }
    const ScanSummary& s = result.summary;
    json doc;
    doc["rows"] = std::move(rows);
    doc["summary"] = {{"pairs", s.pairs},
                      {"sum_inter", format_rational(s.sum_inter)},
                      {"sum_product", format_rational(s.sum_product)},
                      {"trouble_pairs", s.trouble_pairs},
                      {"trouble_mass", format_rational(s.trouble_mass)},
                      {"max_ratio", format_rational(s.max_ratio)},
                      {"argmax_m", s.argmax_m},
                      {"argmax_n", s.argmax_n}};
    return doc.dump(2);
}

GoldenRecord compute_golden_record(unsigned workers) {
    GoldenRecord rec;
    PsiFunction psi = PsiFunction::reciprocal(Rat(1), Rat(1));

    ScanSpec spec;
    spec.min = 16;
    spec.max = 255;
    spec.workers = workers;
    spec.pair_budget = 50'000;
    rec.max_pair_ratio = run_scan(spec, psi).summary.max_ratio;

    rec.max_cross_block_p =
        cross_block_P_scan(psi, 1, 255, 256, 4095, 2'000'000, workers).max_P;

    BlockContext ctx = make_block_context(1, psi);
    rec.max_mertens_ratio = mertens_ratio_scan(ctx, psi, 200'000, workers).max_value;

    BucketTable table = bucketize(ctx, psi, 200'000, workers);
    RescalePlan plan = select_k(ctx, table);
    rescale(plan, psi, ScaleMode::dyadic);
    rec.exceptional_mass_ratio =
        quasi_independence_check(ctx, plan, psi, ExceptionalRule::psi_window, 200'000, workers)
            .mass_ratio;
    return rec;
}

std::string golden_to_json(const GoldenRecord& rec) {
    auto entry = [](const Rat& value, json spec) {
        return json{{"value", format_rational(value)}, {"spec", std::move(spec)}};
    };
    json doc;
    doc["max_pair_ratio"] =
        entry(rec.max_pair_ratio, {{"quantity", "max lambda_inter/(lambda_m lambda_n P)"},
                                   {"pairs", "16 <= m < n <= 255"},
                                   {"psi", "1/n"},
                                   {"c", "1"}});
    doc["max_cross_block_p"] =
        entry(rec.max_cross_block_p, {{"quantity", "max P over pairs in different blocks"},
                                      {"m", "1..255"},
                                      {"n", "256..4095"},
                                      {"psi", "1/n"},
                                      {"c", "1"}});
    doc["max_mertens_ratio"] =
        entry(rec.max_mertens_ratio,
              {{"quantity", "max P * upper((1 + ln D)/R) over pairs with D >= 1"},
               {"block", "h = 1, [16, 256)"},
               {"psi", "1/n"},
               {"c", "1"}});
    doc["exceptional_mass_ratio"] =
        entry(rec.exceptional_mass_ratio,
              {{"quantity", "exceptional pair mass / total block pair mass"},
               {"block", "h = 1, [16, 256)"},
               {"psi", "1/n"},
               {"c", "1"},
               {"scale_mode", "dyadic"},
               {"rule", "psi_window"}});
    return doc.dump(2);
}

GoldenRecord parse_golden(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw parse_error("$", e.what());
    }
    auto field = [&doc](const char* name) {
        if (!doc.contains(name) || !doc[name].contains("value"))
            throw parse_error(std::string("/") + name + "/value", "missing");
        const json& v = doc[name]["value"];
        if (!v.is_string()) throw parse_error(std::string("/") + name + "/value", "expected \"p/q\"");
        try {
            return parse_rational(v.get<std::string>());
        } catch (const std::exception& e) {
            throw parse_error(std::string("/") + name + "/value", e.what());
        }
    };
    GoldenRecord rec;
    rec.max_pair_ratio = field("max_pair_ratio");
    rec.max_cross_block_p = field("max_cross_block_p");
    rec.max_mertens_ratio = field("max_mertens_ratio");
    rec.exceptional_mass_ratio = field("exceptional_mass_ratio");
    return rec;
}

GoldenRecord load_golden_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw resource_error("cannot open golden record: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_golden(buf.str());
}

std::vector<GoldenDiff> diff_golden(const GoldenRecord& stored, const GoldenRecord& fresh) {
    std::vector<GoldenDiff> out;
    auto check = [&out](const char* name, const Rat& a, const Rat& b) {
        if (a != b) out.push_back({name, a, b});
    };
    check("max_pair_ratio", stored.max_pair_ratio, fresh.max_pair_ratio);
    check("max_cross_block_p", stored.max_cross_block_p, fresh.max_cross_block_p);
    check("max_mertens_ratio", stored.max_mertens_ratio, fresh.max_mertens_ratio);
    check("exceptional_mass_ratio", stored.exceptional_mass_ratio, fresh.exceptional_mass_ratio);
    return out;
}

} // namespace dslab
