#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qspec {

/// Number of worker threads used by parallel_for (at least 1).
[[nodiscard]] inline unsigned worker_count() noexcept {
    return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * @brief Runs body(i) for i in [0, n) over contiguous static chunks.
 *
 * Each index is handled by exactly one worker, so results written to slot i
 * are independent of the thread count. The first exception is rethrown.
 */
template <class Body>
void parallel_for(std::size_t n, Body &&body, unsigned workers = worker_count()) {
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            try {
                for (std::size_t i = lo; i < hi; ++i) {
                    body(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace qspec
