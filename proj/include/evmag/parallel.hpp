#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace evmag {

// Worker count: EVMAG_THREADS if set to a positive integer, else hardware concurrency.
inline int thread_count() {
    if (const char* env = std::getenv("EVMAG_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are
// independent; callers must not depend on execution order.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                         std::size_t min_chunk = 1) {
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(thread_count()), std::max<std::size_t>(1, n / min_chunk));
    if (workers <= 1 || n == 0) {
        if (n) body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t step = (n + workers - 1) / workers;
    for (std::size_t b = 0; b < n; b += step) {
        pool.emplace_back(body, b, std::min(n, b + step));
    }
    for (auto& th : pool) th.join();
}

}  // namespace evmag
