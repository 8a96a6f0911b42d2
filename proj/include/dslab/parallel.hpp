#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "dslab/rational.hpp"

namespace dslab {

// Running maximum keyed to the pair that attained it. Larger value wins;
// equal values go to the smaller (m, n), so merging trackers in any order
// picks the same winner.
struct ArgMax {
    Rat value;
    std::uint64_t m = 0;
    std::uint64_t n = 0;
    bool set = false;

    void offer(const Rat& v, std::uint64_t mm, std::uint64_t nn) {
        if (!set || v > value || (v == value && (mm < m || (mm == m && nn < n)))) {
            value = v;
            m = mm;
            n = nn;
            set = true;
        }
    }

    void merge(const ArgMax& other) {
        if (other.set) offer(other.value, other.m, other.n);
    }
};

// Runs work(state, begin, end) over a partition of [0, total) with one
// state per worker and returns the states in worker order. The caller's
// merges must be associative and commutative (exact arithmetic makes them
// so here), which is what keeps results independent of the worker count.
template <class State, class Work>
std::vector<State> parallel_chunks(std::uint64_t total, unsigned workers, Work work) {
    std::uint64_t w = workers == 0 ? 1 : workers;
    if (total > 0 && w > total) w = total;
    std::vector<State> states(static_cast<std::size_t>(w));
    if (w <= 1 || total == 0) {
        work(states[0], std::uint64_t(0), total);
        return states;
    }

    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(w));
    std::uint64_t chunk = total / w;
    std::uint64_t rem = total % w;
    std::uint64_t begin = 0;
    for (std::uint64_t i = 0; i < w; ++i) {
        std::uint64_t len = chunk + (i < rem ? 1 : 0);
        threads.emplace_back([&work, &states, &errors, i, begin, len] {
            try {
                work(states[static_cast<std::size_t>(i)], begin, begin + len);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        });
        begin += len;
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return states;
}

} // namespace dslab
