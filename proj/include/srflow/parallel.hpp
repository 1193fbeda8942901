#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace srflow {

inline int default_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Deterministic parallel map: body(i) writes only to index i of its output;
// chunks are contiguous, so reductions done afterwards are order-stable.
template <typename Body>
void parallel_for(std::size_t count, const Body& body, int threads = 0) {
    if (threads <= 0) threads = default_threads();
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    std::size_t chunk = (count + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace srflow
