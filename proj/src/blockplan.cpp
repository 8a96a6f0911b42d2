#include "dslab/blockplan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "dslab/approxsets.hpp"
#include "dslab/errors.hpp"
#include "dslab/numtheory.hpp"
#include "dslab/overlap.hpp"
#include "dslab/parallel.hpp"

namespace dslab {

namespace {

using nlohmann::json;

// Maps an exact positive rational to the j with e^j <= d < e^{j+1}. The
// irrational thresholds are cached as enclosures; a comparison that lands
// inside an enclosure falls back to the escalating floor_ln. Each worker
// owns one instance, so the cache needs no locking.
class LogBucketizer {
  public:
    long bucket(const Rat& d) {
        if (d <= 0) throw std::domain_error("bucket index needs a positive value");
        double guess = std::log(d.get_d());
        long j = std::isfinite(guess) ? static_cast<long>(std::floor(guess)) : 0;
        while (!at_least(d, j)) --j;
        while (at_least(d, j + 1)) ++j;
        return j;
    }

  private:
    bool at_least(const Rat& d, long j) {
        if (j == 0) return d >= 1;
        auto it = cache_.find(j);
        if (it == cache_.end()) {
            RealBounds b;
            b.lo = exp_dir_lo(Rat(j), 160);
            b.hi = exp_dir_hi(Rat(j), 160);
            it = cache_.emplace(j, std::move(b)).first;
        }
        if (d >= it->second.hi) return true;
        if (d <= it->second.lo) return false;
        return floor_ln(d) >= j;
    }

    std::map<long, RealBounds> cache_;
};

struct Member {
    std::uint64_t n = 0;
    std::uint64_t phi = 0;
    Rat psi;
    Rat f; // psi * phi / n
};

std::vector<Member> block_members(std::uint64_t lo, std::uint64_t hi, const PsiFunction& psi) {
    std::vector<Member> out;
    for (std::uint64_t n = lo; n < hi; ++n) {
        Rat v = psi.evaluate(n);
        if (v == 0) continue;
        Member m;
        m.n = n;
        m.phi = euler_phi(n);
        m.f = v * Rat(m.phi) / Rat(Int(n));
        m.psi = std::move(v);
        out.push_back(std::move(m));
    }
    return out;
}

Rat pair_D(const Member& a, const Member& b) {
    Rat left = a.psi * b.n;  // n psi(m) with (m,n) = (a.n, b.n)
    Rat right = b.psi * a.n; // m psi(n)
    Rat& top = left > right ? left : right;
    return top / std::gcd(a.n, b.n);
}

void check_pair_budget(std::uint64_t count_a, std::uint64_t count_b, std::uint64_t budget) {
    if (static_cast<unsigned __int128>(count_a) * count_b > budget)
        throw resource_error("pair budget " + std::to_string(budget) +
                             " exceeded (raise with --pairs-budget or tighten --cap)");
}

} // namespace

BlockContext make_block_context(unsigned h, const PsiFunction& psi,
                                std::optional<std::uint64_t> cap) {
    const BlockTower& tower = psi.tower();
    const Int& lo = tower.lower(h);
    const Int& hi = tower.lower(h + 1);
    if (!lo.fits_ulong_p())
        throw resource_error("block lower bound does not fit a machine word");

    BlockContext ctx;
    ctx.h = h;
    ctx.block_lo = lo.get_ui();
    if (ctx.block_lo < 3)
        throw std::domain_error("rescaling needs X >= 3 so that R = ln ln X is positive");
    ctx.full_hi = hi.fits_ulong_p() ? hi.get_ui() : std::uint64_t(-1);
    ctx.block_hi = ctx.full_hi;
    if (cap) {
        if (*cap < ctx.block_lo) throw std::domain_error("cap falls below the block");
        ctx.block_hi = std::min(ctx.block_hi, *cap + 1);
    }

    ctx.R = log_log_bounds(ctx.block_lo);
    ctx.R_floor = floor_R(ctx.block_lo);
    ctx.c = psi.c();
    Int k = floor_c_R_logR(ctx.c, ctx.block_lo);
    if (k >= 1) {
        if (!k.fits_slong_p()) throw resource_error("selection bound K does not fit a machine word");
        ctx.K = k.get_si();
    }

    PairwiseSum sum_f, sum_f2;
    for (std::uint64_t n = ctx.block_lo; n < ctx.block_hi; ++n) {
        Rat v = psi.evaluate(n);
        if (v == 0) continue;
        Rat f = v * Rat(euler_phi(n)) / Rat(Int(n));
        sum_f2.add(f * f);
        sum_f.add(std::move(f));
    }
    Rat s = sum_f.total();
    ctx.Psi_X = s * s - sum_f2.total();
    return ctx;
}

BucketTable bucketize(const BlockContext& ctx, const PsiFunction& psi, std::uint64_t pair_budget,
                      unsigned workers) {
    std::vector<Member> ms = block_members(ctx.block_lo, ctx.block_hi, psi);
    std::uint64_t b = ms.size();
    if (b > 1) check_pair_budget(b, b - 1, pair_budget);

    struct State {
        std::map<long, PairwiseSum> sums;
        std::map<long, std::uint64_t> counts;
    };
    std::uint64_t stride = std::min<std::uint64_t>(workers == 0 ? 1 : workers, b == 0 ? 1 : b);
    auto states = parallel_chunks<State>(
        stride, static_cast<unsigned>(stride),
        [&](State& st, std::uint64_t wb, std::uint64_t we) {
            LogBucketizer buckets;
            for (std::uint64_t i = wb; i < we; ++i) {
                // Each worker takes every stride-th outer index; the inner
                // loop covers j > i, and the symmetric (j, i) pair is
                // accounted for by the factor 2.
                for (std::uint64_t outer = i; outer < b; outer += stride) {
                    const Member& a = ms[outer];
                    for (std::uint64_t inner = outer + 1; inner < b; ++inner) {
                        const Member& bb = ms[inner];
                        long j = buckets.bucket(pair_D(a, bb));
                        st.sums[j].add(2 * a.f * bb.f);
                        st.counts[j] += 2;
                    }
                }
            }
        });

    BucketTable table;
    for (const auto& st : states) {
        for (const auto& [j, pws] : st.sums) {
            Rat part = pws.total();
            table.total += part;
            table.t_sums[j] += part;
        }
        for (const auto& [j, cnt] : st.counts) table.pair_counts[j] += cnt;
    }
    return table;
}

RescalePlan select_k(const BlockContext& ctx, const BucketTable& table) {
    RescalePlan plan;
    plan.ctx = ctx;
    for (long k = 1; k <= ctx.K; ++k) {
        Rat s;
        for (long j = k; j <= k + ctx.R_floor; ++j) {
            auto it = table.t_sums.find(j);
            if (it != table.t_sums.end() && it->second != 0) s += it->second / Rat(j + 1 - k);
        }
        plan.s_scaled.emplace(k, std::move(s));
    }
    plan.k_star = 1;
    for (long k = 2; k <= ctx.K; ++k) {
        if (plan.s_scaled.at(k) < plan.s_scaled.at(plan.k_star)) plan.k_star = k;
    }
    return plan;
}

PsiFunction rescale(RescalePlan& plan, const PsiFunction& psi, ScaleMode mode) {
    plan.mode = mode;
    plan.scale = mode == ScaleMode::dyadic
                     ? Rat(Int(1), Int(1) << static_cast<unsigned long>(plan.k_star))
                     : dyadic_exp_neg(plan.k_star);

    const BlockContext& ctx = plan.ctx;
    if (auto parity = psi.parity_filter()) {
        bool block_even = (ctx.h % 2 == 0);
        bool filter_even = (*parity == PsiFunction::Parity::even);
        if (block_even != filter_even) {
            // The whole block is filtered away; rho vanishes identically.
            plan.rho = PsiFunction::from_table({}, psi.c());
            return plan.rho;
        }
        plan.rho = psi.without_parity()
                       .restricted_to_range(ctx.block_lo, ctx.block_hi - 1)
                       .scaled(plan.scale);
        return plan.rho;
    }
    plan.rho = psi.restricted_to_range(ctx.block_lo, ctx.block_hi - 1).scaled(plan.scale);
    return plan.rho;
}

bool scale_bound_holds(const RescalePlan& plan, const Rat& eps) {
    if (plan.scale <= 0 || plan.scale > 1) return false;
    RealBounds neg_ln = neg_ln_bounds(plan.scale);
    Rat rhs = c_R_logR_bounds(plan.ctx.c, plan.ctx.block_lo).hi;
    if (rhs < 1) rhs = 1;
    rhs += eps;
    return neg_ln.hi <= rhs;
}

std::string serialize_plan(const RescalePlan& plan) {
    json doc;
    doc["h"] = plan.ctx.h;
    doc["X"] = plan.ctx.block_lo;
    doc["block_end"] = plan.ctx.block_hi;
    doc["full_block_end"] = plan.ctx.full_hi;
    doc["R"] = bounds_to_decimal(plan.ctx.R);
    doc["R_floor"] = plan.ctx.R_floor;
    doc["K"] = plan.ctx.K;
    doc["c"] = format_rational(plan.ctx.c);
    doc["psi_x"] = format_rational(plan.ctx.Psi_X);
    json s = json::object();
    for (const auto& [k, v] : plan.s_scaled) s[std::to_string(k)] = format_rational(v);
    // S(k) itself is R times this value; R is irrational, so the exact part
    // is stored with R factored out and R reported as a decimal above.
    doc["S_over_R"] = std::move(s);
    doc["k_star"] = plan.k_star;
    doc["scale_mode"] = plan.mode == ScaleMode::dyadic ? "dyadic" : "paper";
    doc["scale"] = format_rational(plan.scale);
    doc["rho"] = json::parse(plan.rho.serialize());
    return doc.dump(2);
}

CrossBlockReport cross_block_P_scan(const PsiFunction& psi, std::uint64_t m_min,
                                    std::uint64_t m_max, std::uint64_t n_min, std::uint64_t n_max,
                                    std::uint64_t pair_budget, unsigned workers) {
    if (m_min == 0 || n_min == 0 || m_min > m_max || n_min > n_max)
        throw std::domain_error("invalid scan ranges");

    CrossBlockReport report;
    for (const auto& v : psi.validate_normalization(m_min, m_max)) {
        if (report.warnings.size() >= 20) break;
        report.warnings.push_back("psi(" + std::to_string(v.n) + ") = " + format_rational(v.value) +
                                  (v.above_half ? " exceeds 1/2" : " is below 1/n"));
    }
    if (n_min != m_min || n_max != m_max) {
        for (const auto& v : psi.validate_normalization(n_min, n_max)) {
            if (report.warnings.size() >= 20) break;
            report.warnings.push_back("psi(" + std::to_string(v.n) + ") = " +
                                      format_rational(v.value) +
                                      (v.above_half ? " exceeds 1/2" : " is below 1/n"));
        }
    }

    const BlockTower& tower = psi.tower();
    auto collect = [&](std::uint64_t lo, std::uint64_t hi) {
        std::vector<std::pair<std::uint64_t, int>> out; // (n, block index or -1)
        for (std::uint64_t n = lo; n <= hi; ++n) {
            if (psi.evaluate(n) == 0) continue;
            auto h = tower.block_index(n);
            out.emplace_back(n, h ? static_cast<int>(*h) : -1);
        }
        return out;
    };
    auto ms = collect(m_min, m_max);
    auto ns = collect(n_min, n_max);
    if (!ms.empty() && !ns.empty()) check_pair_budget(ms.size(), ns.size(), pair_budget);

    struct State {
        ArgMax max;
        std::uint64_t pairs = 0;
    };
    std::uint64_t stride = std::min<std::uint64_t>(workers == 0 ? 1 : workers,
                                                   ms.empty() ? 1 : ms.size());
    auto states = parallel_chunks<State>(
        stride, static_cast<unsigned>(stride), [&](State& st, std::uint64_t wb, std::uint64_t we) {
            for (std::uint64_t w = wb; w < we; ++w) {
                for (std::uint64_t i = w; i < ms.size(); i += stride) {
                    const auto& [m, hm] = ms[i];
                    for (const auto& [n, hn] : ns) {
                        if (m == n || hm < 0 || hn < 0 || hm == hn) continue;
                        ++st.pairs;
                        st.max.offer(factor_P(m, n, psi), m, n);
                    }
                }
            }
        });

    ArgMax merged;
    for (const auto& st : states) {
        report.pairs_scanned += st.pairs;
        merged.merge(st.max);
    }
    if (merged.set) {
        report.max_P = merged.value;
        report.argmax_m = merged.m;
        report.argmax_n = merged.n;
    }
    return report;
}

MertensReport mertens_ratio_scan(const BlockContext& ctx, const PsiFunction& psi,
                                 std::uint64_t pair_budget, unsigned workers) {
    std::vector<Member> ms = block_members(ctx.block_lo, ctx.block_hi, psi);
    std::uint64_t b = ms.size();
    if (b > 1) check_pair_budget(b, b - 1, pair_budget);

    struct State {
        ArgMax max;
        std::uint64_t considered = 0;
        std::uint64_t scanned = 0;
    };
    std::uint64_t stride = std::min<std::uint64_t>(workers == 0 ? 1 : workers, b == 0 ? 1 : b);
    auto states = parallel_chunks<State>(
        stride, static_cast<unsigned>(stride), [&](State& st, std::uint64_t wb, std::uint64_t we) {
            for (std::uint64_t w = wb; w < we; ++w) {
                for (std::uint64_t i = w; i < b; i += stride) {
                    for (std::uint64_t j = i + 1; j < b; ++j) {
                        ++st.scanned;
                        Rat d = pair_D(ms[i], ms[j]);
                        if (d < 1) continue; // the comparison is only claimed from D = 1 up
                        ++st.considered;
                        Rat p = factor_P(ms[i].n, ms[j].n, psi);
                        Rat value = p * upper_one_plus_lnD_over_R(d, ctx.block_lo);
                        st.max.offer(value, ms[i].n, ms[j].n);
                    }
                }
            }
        });

    MertensReport report;
    ArgMax merged;
    for (const auto& st : states) {
        report.pairs_scanned += st.scanned;
        report.pairs_with_d_ge_1 += st.considered;
        merged.merge(st.max);
    }
    if (merged.set) {
        report.max_value = merged.value;
        report.argmax_m = merged.m;
        report.argmax_n = merged.n;
    }
    return report;
}

QuasiIndependenceReport quasi_independence_check(const BlockContext& ctx, const RescalePlan& plan,
                                                 const PsiFunction& psi, ExceptionalRule rule,
                                                 std::uint64_t pair_budget, unsigned workers) {
    std::vector<Member> ms = block_members(ctx.block_lo, ctx.block_hi, psi);
    std::uint64_t b = ms.size();
    if (b > 1) check_pair_budget(b, b - 1, pair_budget);

    // Arc sets under rho, prebuilt once and shared read-only.
    std::uint64_t total_arcs = 0;
    for (const auto& m : ms) total_arcs += m.phi;
    if (total_arcs > 4'000'000)
        throw resource_error("arc total " + std::to_string(total_arcs) +
                             " too large for the pairwise check; tighten --cap");

    std::vector<CircleIntervalUnion> sets(b);
    std::vector<Rat> lambda(b), f_rho(b);
    for (std::uint64_t i = 0; i < b; ++i) {
        sets[i] = build_E(ms[i].n, plan.rho).set;
        lambda[i] = sets[i].measure();
        f_rho[i] = plan.rho.evaluate(ms[i].n) * Rat(ms[i].phi) / Rat(Int(ms[i].n));
    }

    long window_lo = plan.k_star;
    long window_hi = plan.k_star + ctx.R_floor;

    struct State {
        std::uint64_t regular = 0;
        std::uint64_t exceptional = 0;
        ArgMax max_ratio;
        PairwiseSum exceptional_mass;
        PairwiseSum block_mass;
    };
    std::uint64_t stride = std::min<std::uint64_t>(workers == 0 ? 1 : workers, b == 0 ? 1 : b);
    auto states = parallel_chunks<State>(
        stride, static_cast<unsigned>(stride), [&](State& st, std::uint64_t wb, std::uint64_t we) {
            LogBucketizer buckets;
            for (std::uint64_t w = wb; w < we; ++w) {
                for (std::uint64_t i = w; i < b; i += stride) {
                    for (std::uint64_t j = i + 1; j < b; ++j) {
                        Rat d_psi = pair_D(ms[i], ms[j]);
                        Rat mass_term = 2 * f_rho[i] * f_rho[j];
                        st.block_mass.add(mass_term);

                        Rat d_for_rule =
                            rule == ExceptionalRule::psi_window ? d_psi : d_psi * plan.scale;
                        long bucket = buckets.bucket(d_for_rule);
                        if (bucket >= window_lo && bucket <= window_hi) {
                            ++st.exceptional;
                            // P recomputed with rho: same prime set, the
                            // threshold D shrinks by the scale factor.
                            Rat d_rho = d_psi * plan.scale;
                            Rat p(1);
                            for (std::uint64_t q : cross_radical_primes(ms[i].n, ms[j].n)) {
                                if (Rat(q) > d_rho) p *= Rat(q) / Rat(q - 1);
                            }
                            st.exceptional_mass.add(mass_term * p);
                        } else {
                            ++st.regular;
                            Rat denom = lambda[i] * lambda[j];
                            if (denom > 0) {
                                Rat ratio = intersect(sets[i], sets[j]).measure() / denom;
                                st.max_ratio.offer(ratio, ms[i].n, ms[j].n);
                            }
                        }
                    }
                }
            }
        });

    QuasiIndependenceReport report;
    ArgMax merged;
    for (const auto& st : states) {
        report.regular_pairs += st.regular;
        report.exceptional_pairs += st.exceptional;
        report.exceptional_mass += st.exceptional_mass.total();
        report.block_mass += st.block_mass.total();
        merged.merge(st.max_ratio);
    }
    if (merged.set) {
        report.max_regular_ratio = merged.value;
        report.argmax_m = merged.m;
        report.argmax_n = merged.n;
    }
    if (report.block_mass > 0) report.mass_ratio = report.exceptional_mass / report.block_mass;
    return report;
}

} // namespace dslab
