#pragma once

// Static-partition parallel loop. Each worker owns a contiguous index range,
// so callers that write per-index results get output independent of the
// thread count.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nlkit {

inline unsigned default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Calls body(begin, end) on disjoint chunks covering [0, count).
template <class Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
    threads = std::max(1U, threads);
    if (threads == 1 || count < 2) {
        if (count) body(std::size_t{0}, count);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, count);
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Calls body(i) for every i in [0, count).
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    parallel_chunks(count, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) body(i);
    });
}

}  // namespace nlkit
