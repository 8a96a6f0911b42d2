#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dslab/approxsets.hpp"
#include "dslab/blockplan.hpp"
#include "dslab/errors.hpp"
#include "dslab/overlap.hpp"
#include "dslab/scan.hpp"
#include "dslab/seriesmoment.hpp"

namespace {

using dslab::Rat;
using nlohmann::json;

struct PsiOpts {
    std::string path;
    std::string c_override;
};

void add_psi_opts(CLI::App* cmd, PsiOpts& opts, bool required = true) {
    auto* p = cmd->add_option("--psi", opts.path, "psi document (JSON)");
    if (required) p->required();
    cmd->add_option("--c", opts.c_override, "override the damping constant, as P/Q");
}

dslab::PsiFunction load_psi(const PsiOpts& opts) {
    dslab::PsiFunction psi = dslab::PsiFunction::load_file(opts.path);
    if (!opts.c_override.empty()) psi = psi.with_c(dslab::parse_rational(opts.c_override));
    return psi;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw dslab::resource_error("cannot open output file: " + out_path);
    out << text;
}

json bounds_json(const dslab::RealBounds& b) {
    return {{"lo", dslab::format_rational(b.lo)},
            {"hi", dslab::format_rational(b.hi)},
            {"decimal", dslab::bounds_to_decimal(b)}};
}

dslab::ScaleMode parse_scale_mode(const std::string& s) {
    return s == "paper" ? dslab::ScaleMode::paper : dslab::ScaleMode::dyadic;
}

json pair_row_json(const dslab::PairStats& r) {
    return {{"m", r.m},
            {"n", r.n},
            {"lambda_m", dslab::format_rational(r.lambda_m)},
            {"lambda_n", dslab::format_rational(r.lambda_n)},
            {"lambda_inter", dslab::format_rational(r.lambda_inter)},
            {"A", dslab::format_rational(r.A)},
            {"D", dslab::format_rational(r.D)},
            {"P", dslab::format_rational(r.P)},
            {"Sigma", r.sigma},
            {"indep_rhs", dslab::format_rational(r.indep_rhs)},
            {"ratio", dslab::format_rational(r.ratio)}};
}

// Shared tail of blocks/rescale/qcheck: context, buckets, selection.
struct PlanRun {
    dslab::BlockContext ctx;
    dslab::BucketTable table;
    dslab::RescalePlan plan;
};

PlanRun run_plan(unsigned h, const dslab::PsiFunction& psi, std::optional<std::uint64_t> cap,
                 std::uint64_t pair_budget, unsigned workers, dslab::ScaleMode mode) {
    PlanRun run;
    run.ctx = dslab::make_block_context(h, psi, cap);
    run.table = dslab::bucketize(run.ctx, psi, pair_budget, workers);
    run.plan = dslab::select_k(run.ctx, run.table);
    dslab::rescale(run.plan, psi, mode);
    return run;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-arithmetic toolkit for coprime-arc approximation sets"};
    // long-only help so the block selector can be spelled --h
    app.set_help_flag("--help", "print usage and exit");
    app.require_subcommand(1);

    PsiOpts psi_en, psi_pair, psi_scan, psi_series, psi_moment, psi_blocks, psi_rescale,
        psi_qcheck;
    std::string out_path, format = "csv", scale_mode = "dyadic", rule = "psi-window";
    std::string verify_path;
    std::uint64_t m = 0, n = 0, min = 0, max = 0, cap = 0, sample = 0, seed = 0;
    std::uint64_t pair_budget = 1'000'000, arc_budget = dslab::kDefaultArcBudget;
    unsigned h = 0, workers = 1;
    std::string filter = "all";
    bool regen = false;

    auto* en = app.add_subcommand("en", "arcs and measure of one approximation set E_n");
    add_psi_opts(en, psi_en);
    en->add_option("--n", n, "modulus")->required();
    en->add_option("--out", out_path, "output path (default stdout)");
    en->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* pair = app.add_subcommand("pair", "overlap statistics for one pair (m, n)");
    add_psi_opts(pair, psi_pair);
    pair->add_option("--m", m, "first modulus")->required();
    pair->add_option("--n", n, "second modulus")->required();
    pair->add_option("--out", out_path, "output path (default stdout)");
    pair->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* scan = app.add_subcommand("scan", "pairwise statistics over a range or block");
    add_psi_opts(scan, psi_scan);
    scan->add_option("--min", min, "range start (inclusive)");
    scan->add_option("--max", max, "range end (inclusive)");
    scan->add_option("--h", h, "tower block index instead of --min/--max");
    scan->add_option("--cap", cap, "truncate the block at this value");
    scan->add_option("--filter", filter, "pair filter")
        ->check(CLI::IsMember({"all", "cross-block", "within-block"}));
    scan->add_option("--sample", sample, "sample this many pairs uniformly");
    scan->add_option("--seed", seed, "sampling seed");
    scan->add_option("--pairs-budget", pair_budget, "maximum pair count");
    scan->add_option("--arc-budget", arc_budget, "maximum total arc count");
    scan->add_option("--workers", workers, "worker threads");
    scan->add_option("--out", out_path, "output path (default stdout)");
    scan->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* series = app.add_subcommand("series", "partial sums of the plain and damped series");
    add_psi_opts(series, psi_series);
    series->add_option("--max", max, "summation cutoff N")->required();
    series->add_option("--out", out_path, "output path (default stdout)");

    auto* moment = app.add_subcommand("moment", "second-moment lower bound vs union measure");
    add_psi_opts(moment, psi_moment);
    moment->add_option("--max", max, "summation cutoff N")->required();
    moment->add_option("--pairs-budget", pair_budget, "maximum pair count");
    moment->add_option("--out", out_path, "output path (default stdout)");

    auto* blocks = app.add_subcommand("blocks", "block context and threshold bucket sums");
    add_psi_opts(blocks, psi_blocks);
    blocks->add_option("--h", h, "tower block index")->required();
    blocks->add_option("--cap", cap, "truncate the block at this value");
    blocks->add_option("--pairs-budget", pair_budget, "maximum pair count");
    blocks->add_option("--workers", workers, "worker threads");
    blocks->add_option("--out", out_path, "output path (default stdout)");

    auto* rescale = app.add_subcommand("rescale", "select k and emit the rescaled function");
    add_psi_opts(rescale, psi_rescale);
    rescale->add_option("--h", h, "tower block index")->required();
    rescale->add_option("--cap", cap, "truncate the block at this value");
    rescale->add_option("--scale-mode", scale_mode, "dyadic or paper")
        ->check(CLI::IsMember({"dyadic", "paper"}));
    rescale->add_option("--pairs-budget", pair_budget, "maximum pair count");
    rescale->add_option("--workers", workers, "worker threads");
    rescale->add_option("--out", out_path, "output path (default stdout)");

    auto* qcheck = app.add_subcommand("qcheck", "pairwise independence check after rescaling");
    add_psi_opts(qcheck, psi_qcheck);
    qcheck->add_option("--h", h, "tower block index")->required();
    qcheck->add_option("--cap", cap, "truncate the block at this value");
    qcheck->add_option("--scale-mode", scale_mode, "dyadic or paper")
        ->check(CLI::IsMember({"dyadic", "paper"}));
    qcheck->add_option("--rule", rule, "exceptional-pair rule")
        ->check(CLI::IsMember({"psi-window", "rho-buckets"}));
    qcheck->add_option("--pairs-budget", pair_budget, "maximum pair count");
    qcheck->add_option("--workers", workers, "worker threads");
    qcheck->add_option("--out", out_path, "output path (default stdout)");

    auto* golden = app.add_subcommand("golden", "regenerate or verify the pinned constants");
    golden->add_flag("--regen", regen, "recompute the constants and emit JSON");
    golden->add_option("--verify", verify_path, "recompute and compare against this file");
    golden->add_option("--workers", workers, "worker threads");
    golden->add_option("--out", out_path, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (en->parsed()) {
            dslab::ApproxSet set = dslab::build_E(n, load_psi(psi_en));
            if (format == "json") {
                json arcs = json::array();
                for (const auto& a : set.set.arcs())
                    arcs.push_back({dslab::format_rational(a.lo), dslab::format_rational(a.hi)});
                json doc{{"n", set.n},
                         {"psi_n", dslab::format_rational(set.psi_n)},
                         {"measure", dslab::format_rational(set.set.measure())},
                         {"arcs", std::move(arcs)}};
                emit(out_path, doc.dump(2));
            } else {
                std::string text = "lo,hi\n";
                for (const auto& a : set.set.arcs())
                    text += dslab::format_rational(a.lo) + "," + dslab::format_rational(a.hi) + "\n";
                text += "measure," + dslab::format_rational(set.set.measure()) + "\n";
                emit(out_path, text);
            }
        } else if (pair->parsed()) {
            dslab::PairStats row = dslab::pair_stats(m, n, load_psi(psi_pair));
            if (format == "json") emit(out_path, pair_row_json(row).dump(2));
            else emit(out_path, dslab::rows_to_csv({row}));
        } else if (scan->parsed()) {
            dslab::ScanSpec spec;
            if (scan->count("--h")) {
                spec.h = h;
                if (scan->count("--cap")) spec.cap = cap;
            } else {
                if (!scan->count("--min") || !scan->count("--max"))
                    throw std::domain_error("a scan needs --min/--max or --h");
                spec.min = min;
                spec.max = max;
            }
            if (scan->count("--sample")) {
                if (filter != "all")
                    throw std::domain_error("--sample replaces --filter; give one or the other");
                spec.filter = dslab::PairFilter::sampled;
                spec.sample_count = sample;
                spec.seed = seed;
            } else if (filter == "cross-block") {
                spec.filter = dslab::PairFilter::cross_block;
            } else if (filter == "within-block") {
                spec.filter = dslab::PairFilter::within_block;
            }
            spec.pair_budget = pair_budget;
            spec.arc_budget = arc_budget;
            spec.workers = workers;
            dslab::ScanResult result = dslab::run_scan(spec, load_psi(psi_scan));
            if (format == "json") {
                emit(out_path, dslab::result_to_json(result));
            } else {
                emit(out_path, dslab::rows_to_csv(result.rows));
                const dslab::ScanSummary& s = result.summary;
                json summary{{"pairs", s.pairs},
                             {"sum_inter", dslab::format_rational(s.sum_inter)},
                             {"sum_product", dslab::format_rational(s.sum_product)},
                             {"trouble_pairs", s.trouble_pairs},
                             {"trouble_mass", dslab::format_rational(s.trouble_mass)},
                             {"max_ratio", dslab::format_rational(s.max_ratio)},
                             {"argmax_m", s.argmax_m},
                             {"argmax_n", s.argmax_n}};
                // rows go to the requested sink; the summary goes to the
                // other stream so the CSV stays clean
                (out_path.empty() ? std::cerr : std::cout) << summary.dump(2) << '\n';
            }
        } else if (series->parsed()) {
            dslab::SeriesReport rep = dslab::series_report(load_psi(psi_series), max);
            json checkpoints = json::array();
            for (const auto& cp : rep.checkpoints)
                checkpoints.push_back({{"N", cp.N},
                                       {"partial_plain", dslab::format_rational(cp.partial_plain)},
                                       {"partial_extra", bounds_json(cp.partial_extra)},
                                       {"partial_fc", bounds_json(cp.partial_fc)}});
            json doc{{"N", rep.N},
                     {"partial_plain", dslab::format_rational(rep.partial_plain)},
                     {"partial_plain_decimal", dslab::rat_to_decimal(rep.partial_plain)},
                     {"partial_extra", bounds_json(rep.partial_extra)},
                     {"partial_fc", bounds_json(rep.partial_fc)},
                     {"checkpoints", std::move(checkpoints)}};
            emit(out_path, doc.dump(2));
        } else if (moment->parsed()) {
            dslab::MomentBound mb = dslab::second_moment_bound(load_psi(psi_moment), max, pair_budget);
            json doc{{"N", max},
                     {"numerator", dslab::format_rational(mb.numerator)},
                     {"denominator", dslab::format_rational(mb.denominator)},
                     {"bound", dslab::format_rational(mb.bound)},
                     {"union_measure", dslab::format_rational(mb.union_measure)},
                     {"bound_le_union", mb.bound <= mb.union_measure}};
            emit(out_path, doc.dump(2));
        } else if (blocks->parsed()) {
            dslab::PsiFunction psi = load_psi(psi_blocks);
            std::optional<std::uint64_t> capv;
            if (blocks->count("--cap")) capv = cap;
            dslab::BlockContext ctx = dslab::make_block_context(h, psi, capv);
            dslab::BucketTable table = dslab::bucketize(ctx, psi, pair_budget, workers);
            json buckets = json::object();
            for (const auto& [j, t] : table.t_sums)
                buckets[std::to_string(j)] = {{"t", dslab::format_rational(t)},
                                              {"pairs", table.pair_counts.at(j)}};
            json doc{{"h", ctx.h},
                     {"X", ctx.block_lo},
                     {"block_end", ctx.block_hi},
                     {"full_block_end", ctx.full_hi},
                     {"R", dslab::bounds_to_decimal(ctx.R)},
                     {"R_floor", ctx.R_floor},
                     {"K", ctx.K},
                     {"c", dslab::format_rational(ctx.c)},
                     {"psi_x", dslab::format_rational(ctx.Psi_X)},
                     {"buckets", std::move(buckets)},
                     {"total", dslab::format_rational(table.total)},
                     {"partition_exact", table.total == ctx.Psi_X}};
            emit(out_path, doc.dump(2));
        } else if (rescale->parsed()) {
            dslab::PsiFunction psi = load_psi(psi_rescale);
            std::optional<std::uint64_t> capv;
            if (rescale->count("--cap")) capv = cap;
            PlanRun run = run_plan(h, psi, capv, pair_budget, workers, parse_scale_mode(scale_mode));
            json doc = json::parse(dslab::serialize_plan(run.plan));
            doc["scale_bound_ok"] = dslab::scale_bound_holds(run.plan);
            emit(out_path, doc.dump(2));
        } else if (qcheck->parsed()) {
            dslab::PsiFunction psi = load_psi(psi_qcheck);
            std::optional<std::uint64_t> capv;
            if (qcheck->count("--cap")) capv = cap;
            PlanRun run = run_plan(h, psi, capv, pair_budget, workers, parse_scale_mode(scale_mode));
            dslab::ExceptionalRule erule = rule == "rho-buckets"
                                               ? dslab::ExceptionalRule::rho_buckets
                                               : dslab::ExceptionalRule::psi_window;
            dslab::QuasiIndependenceReport rep =
                dslab::quasi_independence_check(run.ctx, run.plan, psi, erule, pair_budget, workers);
            json doc{{"h", run.ctx.h},
                     {"k_star", run.plan.k_star},
                     {"scale_mode", scale_mode},
                     {"scale", dslab::format_rational(run.plan.scale)},
                     {"rule", rule},
                     {"regular_pairs", rep.regular_pairs},
                     {"exceptional_pairs", rep.exceptional_pairs},
                     {"max_regular_ratio", dslab::format_rational(rep.max_regular_ratio)},
                     {"argmax_m", rep.argmax_m},
                     {"argmax_n", rep.argmax_n},
                     {"exceptional_mass", dslab::format_rational(rep.exceptional_mass)},
                     {"block_mass", dslab::format_rational(rep.block_mass)},
                     {"mass_ratio", dslab::format_rational(rep.mass_ratio)}};
            emit(out_path, doc.dump(2));
        } else if (golden->parsed()) {
            if (regen != verify_path.empty())
                throw std::domain_error("give exactly one of --regen or --verify FILE");
            if (regen) {
                emit(out_path, dslab::golden_to_json(dslab::compute_golden_record(workers)));
            } else {
                dslab::GoldenRecord stored = dslab::load_golden_file(verify_path);
                dslab::GoldenRecord fresh = dslab::compute_golden_record(workers);
                auto diffs = dslab::diff_golden(stored, fresh);
                for (const auto& d : diffs)
                    std::cout << "DIFF " << d.name << ": stored " << dslab::format_rational(d.stored)
                              << ", regenerated " << dslab::format_rational(d.fresh) << '\n';
                if (diffs.empty()) std::cout << "all constants match\n";
                return diffs.empty() ? 0 : 1;
            }
        }
    } catch (const dslab::parse_error& e) {
        std::cerr << "error: parse: " << e.what() << '\n';
        return 1;
    } catch (const dslab::resource_error& e) {
        std::cerr << "error: resource: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: domain: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
