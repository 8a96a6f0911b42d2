#include "dslab/psifun.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dslab/errors.hpp"

namespace dslab {

using nlohmann::json;

std::shared_ptr<const BlockTower> default_tower() {
    static const auto tower = std::make_shared<const BlockTower>();
    return tower;
}

namespace {

// Exact ceil(log2 n); the n = 1 case is clamped to 1 so the log-damped
// family stays positive everywhere.
unsigned long ceil_log2(std::uint64_t n) {
    if (n <= 2) return 1;
    return std::bit_width(n - 1);
}

Rat parse_nonnegative(const json& node, const std::string& location) {
    if (!node.is_string()) throw parse_error(location, "expected a rational string \"p/q\"");
    Rat value = parse_rational(node.get<std::string>(), location);
    if (value < 0) throw parse_error(location, "value must be non-negative");
    return value;
}

std::uint64_t parse_index(const std::string& key, const std::string& location) {
    if (key.empty() || key.size() > 19) throw parse_error(location, "index out of range");
    for (char ch : key)
        if (ch < '0' || ch > '9') throw parse_error(location, "index must be a decimal integer");
    std::uint64_t n = std::stoull(key);
    if (n == 0) throw parse_error(location, "index must be positive");
    return n;
}

} // namespace

PsiFunction PsiFunction::constant(Rat q, Rat c) {
    PsiFunction f;
    f.family_ = Family::constant;
    f.q_ = std::move(q);
    f.c_ = std::move(c);
    return f;
}

PsiFunction PsiFunction::reciprocal(Rat q, Rat c) {
    PsiFunction f;
    f.family_ = Family::reciprocal;
    f.q_ = std::move(q);
    f.c_ = std::move(c);
    return f;
}

PsiFunction PsiFunction::log_damped(Rat q, Rat c) {
    PsiFunction f;
    f.family_ = Family::log_damped;
    f.q_ = std::move(q);
    f.c_ = std::move(c);
    return f;
}

PsiFunction PsiFunction::from_table(std::map<std::uint64_t, Rat> values, Rat c) {
    PsiFunction f;
    f.table_ = std::move(values);
    f.c_ = std::move(c);
    return f;
}

Rat PsiFunction::raw_value(std::uint64_t n) const {
    if (!family_) {
        auto it = table_.find(n);
        return it == table_.end() ? Rat() : it->second;
    }
    switch (*family_) {
        case Family::constant: return q_;
        case Family::reciprocal: return q_ / Rat(Int(n));
        case Family::log_damped: return q_ / (Rat(Int(n)) * Rat(ceil_log2(n)));
    }
    return Rat();
}

Rat PsiFunction::evaluate(std::uint64_t n) const {
    if (n == 0) throw std::domain_error("psi is defined on positive integers only");
    if (range_ && (n < range_->first || n > range_->second)) return Rat();
    if (parity_) {
        auto h = tower_->block_index(n);
        if (!h) return Rat();
        bool even = (*h % 2 == 0);
        if (even != (*parity_ == Parity::even)) return Rat();
    }
    return raw_value(n);
}

PsiFunction PsiFunction::restricted_to_parity(Parity p) const {
    if (parity_ && *parity_ != p) {
        // Disjoint restrictions: the result is identically zero.
        PsiFunction zero = from_table({}, c_);
        zero.tower_ = tower_;
        return zero;
    }
    PsiFunction out = *this;
    out.parity_ = p;
    return out;
}

PsiFunction PsiFunction::restricted_to_range(std::uint64_t min, std::uint64_t max) const {
    if (min == 0 || min > max) throw std::domain_error("empty or invalid support range");
    PsiFunction out = *this;
    if (out.range_) {
        out.range_->first = std::max(out.range_->first, min);
        out.range_->second = std::min(out.range_->second, max);
        if (out.range_->first > out.range_->second) {
            PsiFunction zero = from_table({}, c_);
            zero.tower_ = tower_;
            return zero;
        }
    } else {
        out.range_ = {min, max};
    }
    return out;
}

std::pair<PsiFunction, PsiFunction> PsiFunction::split_by_parity() const {
    return {restricted_to_parity(Parity::even), restricted_to_parity(Parity::odd)};
}

PsiFunction PsiFunction::without_parity() const {
    PsiFunction out = *this;
    out.parity_.reset();
    return out;
}

PsiFunction PsiFunction::with_c(const Rat& c) const {
    if (c <= 0) throw std::domain_error("damping constant must be positive");
    PsiFunction out = *this;
    out.c_ = c;
    return out;
}

PsiFunction PsiFunction::scaled(const Rat& factor) const {
    if (factor < 0) throw std::domain_error("scale factor must be non-negative");
    PsiFunction out = *this;
    if (out.family_) {
        out.q_ *= factor;
    } else {
        for (auto& [n, v] : out.table_) v *= factor;
    }
    return out;
}

std::vector<PsiFunction::Violation> PsiFunction::validate_normalization(std::uint64_t lo,
                                                                        std::uint64_t hi) const {
    std::vector<Violation> out;
    for (std::uint64_t n = lo; n <= hi && n != 0; ++n) {
        Rat v = evaluate(n);
        if (v == 0) continue;
        if (v * Rat(Int(n)) < 1) {
            out.push_back({n, std::move(v), false});
        } else if (2 * v > 1) {
            out.push_back({n, std::move(v), true});
        }
    }
    return out;
}

void PsiFunction::attach_tower(std::shared_ptr<const BlockTower> tower) {
    if (!tower) throw std::domain_error("null tower");
    tower_ = std::move(tower);
}

PsiFunction PsiFunction::load(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw parse_error("$", e.what());
    }
    if (!doc.is_object()) throw parse_error("$", "expected a JSON object");

    if (!doc.contains("c")) throw parse_error("/c", "missing required damping constant");
    Rat c = parse_nonnegative(doc.at("c"), "/c");
    if (c == 0) throw parse_error("/c", "damping constant must be positive");

    bool has_family = doc.contains("family");
    bool has_table = doc.contains("table");
    if (has_family == has_table)
        throw parse_error("$", "exactly one of \"family\" and \"table\" is required");

    PsiFunction f;
    if (has_family) {
        const json& fam = doc.at("family");
        if (!fam.is_string()) throw parse_error("/family", "expected a family name string");
        std::string name = fam.get<std::string>();
        if (!doc.contains("q")) throw parse_error("/q", "missing family parameter");
        Rat q = parse_nonnegative(doc.at("q"), "/q");
        if (name == "constant") {
            f = constant(std::move(q), c);
        } else if (name == "reciprocal") {
            f = reciprocal(std::move(q), c);
        } else if (name == "log_damped") {
            f = log_damped(std::move(q), c);
        } else {
            throw parse_error("/family", "unknown family \"" + name + "\"");
        }
    } else {
        const json& tab = doc.at("table");
        if (!tab.is_object()) throw parse_error("/table", "expected an object of index -> rational");
        std::map<std::uint64_t, Rat> values;
        for (const auto& [key, node] : tab.items()) {
            std::string loc = "/table/" + key;
            std::uint64_t n = parse_index(key, loc);
            values.emplace(n, parse_nonnegative(node, loc));
        }
        f = from_table(std::move(values), c);
    }

    if (doc.contains("support")) {
        const json& sup = doc.at("support");
        if (sup.is_string()) {
            std::string s = sup.get<std::string>();
            if (s == "even_blocks") {
                f.parity_ = Parity::even;
            } else if (s == "odd_blocks") {
                f.parity_ = Parity::odd;
            } else {
                throw parse_error("/support", "unknown support keyword \"" + s + "\"");
            }
        } else if (sup.is_object()) {
            if (!sup.contains("min") || !sup.contains("max"))
                throw parse_error("/support", "range support needs \"min\" and \"max\"");
            const json& mn = sup.at("min");
            const json& mx = sup.at("max");
            if (!mn.is_number_unsigned() || mn.get<std::uint64_t>() == 0)
                throw parse_error("/support/min", "expected a positive integer");
            if (!mx.is_number_unsigned())
                throw parse_error("/support/max", "expected a positive integer");
            std::uint64_t lo = mn.get<std::uint64_t>();
            std::uint64_t hi = mx.get<std::uint64_t>();
            if (lo > hi) throw parse_error("/support", "min exceeds max");
            f.range_ = {lo, hi};
        } else {
            throw parse_error("/support", "expected a keyword or {\"min\",\"max\"} object");
        }
    }
    return f;
}

PsiFunction PsiFunction::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw resource_error("cannot open psi document: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load(buf.str());
}

std::string PsiFunction::serialize() const {
    json doc = json::object();
    if (family_) {
        switch (*family_) {
            case Family::constant: doc["family"] = "constant"; break;
            case Family::reciprocal: doc["family"] = "reciprocal"; break;
            case Family::log_damped: doc["family"] = "log_damped"; break;
        }
        doc["q"] = format_rational(q_);
    } else {
        json tab = json::object();
        for (const auto& [n, v] : table_) tab[std::to_string(n)] = format_rational(v);
        doc["table"] = std::move(tab);
    }
    doc["c"] = format_rational(c_);
    if (parity_ && range_)
        throw std::domain_error("combined parity and range support has no document form");
    if (parity_) doc["support"] = (*parity_ == Parity::even) ? "even_blocks" : "odd_blocks";
    if (range_) doc["support"] = {{"min", range_->first}, {"max", range_->second}};
    return doc.dump(2);
}

} // namespace dslab
