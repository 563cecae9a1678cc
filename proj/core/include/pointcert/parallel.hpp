#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pointcert {

/// Runs fn(i) for i in [0, n) on up to `threads` workers in contiguous
/// chunks. fn must not depend on execution order. The first exception thrown
/// by any worker is rethrown on the caller.
inline void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    if (n <= 0) return;
    if (threads < 1) threads = 1;
    const std::int64_t workers = std::min<std::int64_t>(threads, n);
    if (workers == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::exception_ptr first_error;
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (std::int64_t w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::int64_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace pointcert
