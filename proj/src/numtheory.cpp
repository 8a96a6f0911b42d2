#include "dslab/numtheory.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dslab {

Rat parse_rational(const std::string& text, const std::string& location) {
    if (text.empty())
        throw parse_error(location, "empty rational");
    std::size_t pos = 0;
    if (text[0] == '-')
        pos = 1;
    if (pos >= text.size())
        throw parse_error(location, "malformed rational '" + text + "'");
    bool seen_slash = false;
    std::size_t slash_at = 0;
    for (std::size_t i = pos; i < text.size(); ++i) {
        char c = text[i];
        if (c == '/') {
            if (seen_slash || i == pos || i + 1 == text.size())
                throw parse_error(location, "malformed rational '" + text + "'");
            seen_slash = true;
            slash_at = i;
        } else if (c < '0' || c > '9') {
            throw parse_error(location, "malformed rational '" + text + "'");
        }
    }
    if (seen_slash) {
        std::string den = text.substr(slash_at + 1);
        if (den.find_first_not_of('0') == std::string::npos)
            throw parse_error(location, "zero denominator in '" + text + "'");
    }
    Rat q;
    if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
        throw parse_error(location, "malformed rational '" + text + "'");
    q.canonicalize();
    return q;
}

std::string format_rational(const Rat& q) {
    return q.get_str();
}

Int rat_floor(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

Rat tree_sum(std::vector<Rat> terms) {
    if (terms.empty())
        return Rat(0);
    while (terms.size() > 1) {
        std::size_t half = (terms.size() + 1) / 2;
        for (std::size_t i = 0; 2 * i + 1 < terms.size(); ++i)
            terms[i] = terms[2 * i] + terms[2 * i + 1];
        if (terms.size() % 2 == 1)
            terms[half - 1] = terms.back();
        terms.resize(half);
    }
    return terms[0];
}

void FixedDenomSum::add(const Rat& q) {
    // num += q.num * (den_ / q.den); exact by the divisibility contract
    Int scale;
    mpz_divexact(scale.get_mpz_t(), den_.get_mpz_t(), q.get_den().get_mpz_t());
    mpz_addmul(num_.get_mpz_t(), q.get_num().get_mpz_t(), scale.get_mpz_t());
}

void FixedDenomSum::merge(const FixedDenomSum& other) {
    if (den_ != other.den_)
        throw std::logic_error("FixedDenomSum: mismatched denominators");
    num_ += other.num_;
}

Rat FixedDenomSum::value() const {
    Rat q(num_, den_);
    q.canonicalize();
    return q;
}

Factorization factorize(std::uint64_t n) {
    if (n == 0)
        throw std::domain_error("factorize: n must be positive");
    Factorization out;
    out.n = n;
    auto strip = [&](std::uint64_t p) {
        if (n % p != 0)
            return;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.factors.emplace_back(p, e);
    };
    strip(2);
    strip(3);
    for (std::uint64_t d = 5; d <= n / d; d += 6) {
        strip(d);
        strip(d + 2);
    }
    if (n > 1)
        out.factors.emplace_back(n, 1);
    return out;
}

std::uint64_t euler_phi(std::uint64_t n) {
    if (n == 0)
        throw std::domain_error("euler_phi: n must be positive");
    std::uint64_t result = n;
    for (const auto& [p, e] : factorize(n).factors) {
        result -= result / p;
        (void)e;
    }
    return result;
}

std::vector<std::uint64_t> cross_radical_primes(std::uint64_t m, std::uint64_t n) {
    if (m == 0 || n == 0)
        throw std::domain_error("cross_radical_primes: arguments must be positive");
    std::uint64_t g = std::gcd(m, n);
    std::uint64_t a = m / g;
    std::uint64_t b = n / g;
    std::vector<std::uint64_t> primes;
    for (const auto& [p, e] : factorize(a).factors)
        primes.push_back(p);
    for (const auto& [p, e] : factorize(b).factors)
        primes.push_back(p);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    return primes;
}

TotientTable::TotientTable(std::uint64_t limit, std::uint64_t entry_budget)
    : limit_(limit) {
    if (limit == 0)
        throw std::domain_error("totient_sieve: limit must be positive");
    if (limit + 1 > entry_budget) {
        std::ostringstream msg;
        msg << "totient_sieve: limit " << limit << " exceeds entry budget "
            << entry_budget << " (raise the budget to allocate more)";
        throw resource_error(msg.str());
    }
    phi_.resize(limit + 1);
    for (std::uint64_t i = 0; i <= limit; ++i)
        phi_[i] = i;
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (phi_[p] == p) { // p prime
            for (std::uint64_t k = p; k <= limit; k += p)
                phi_[k] -= phi_[k] / p;
        }
    }
}

SpfTable::SpfTable(std::uint64_t limit, std::uint64_t entry_budget) : limit_(limit) {
    if (limit == 0)
        throw std::domain_error("spf sieve: limit must be positive");
    if (limit + 1 > entry_budget || limit > UINT32_MAX) {
        std::ostringstream msg;
        msg << "spf sieve: limit " << limit << " exceeds entry budget " << entry_budget;
        throw resource_error(msg.str());
    }
    spf_.assign(limit + 1, 0);
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (spf_[p] == 0) {
            for (std::uint64_t k = p; k <= limit; k += p)
                if (spf_[k] == 0)
                    spf_[k] = static_cast<std::uint32_t>(p);
        }
    }
}

Factorization SpfTable::factorize(std::uint64_t n) const {
    if (n == 0 || n > limit_)
        throw std::domain_error("spf factorize: n out of table range");
    Factorization out;
    out.n = n;
    while (n > 1) {
        std::uint64_t p = spf_[n];
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.factors.emplace_back(p, e);
    }
    return out;
}

std::vector<std::uint64_t> SpfTable::distinct_primes(std::uint64_t n) const {
    std::vector<std::uint64_t> primes;
    if (n == 0 || n > limit_)
        throw std::domain_error("spf distinct_primes: n out of table range");
    while (n > 1) {
        std::uint64_t p = spf_[n];
        primes.push_back(p);
        while (n % p == 0)
            n /= p;
    }
    return primes;
}

} // namespace dslab
