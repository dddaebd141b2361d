#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hypharm {

// Worker count: VERIFY_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("VERIFY_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return hw;
}

namespace detail {
// set on pool workers so nested parallel calls run serially on the calling worker
inline thread_local bool in_worker = false;
} // namespace detail

// Calls fn(i) for i in [0, n). Each index is handled by exactly one worker, so results
// written to slot i are independent of scheduling. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = 0) {
    if (threads == 0) threads = worker_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1 || detail::in_worker) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto body = [&] {
        detail::in_worker = true;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Evaluates fn(i) for every i and returns the values in index order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn, unsigned threads = 0) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); }, threads);
    return out;
}

// Sum of fn(i) over [0, n), accumulated in fixed chunks so the result does not depend on the
// thread count.
template <typename T, typename Fn>
T parallel_sum(std::size_t n, Fn&& fn, unsigned threads = 0) {
    constexpr std::size_t chunks = 64;
    const std::size_t nc = std::min(chunks, std::max<std::size_t>(n, 1));
    std::vector<T> part = parallel_map<T>(
        nc,
        [&](std::size_t c) {
            T acc{};
            for (std::size_t i = c * n / nc; i < (c + 1) * n / nc; ++i) acc += fn(i);
            return acc;
        },
        threads);
    T acc{};
    for (const T& v : part) acc += v;
    return acc;
}

} // namespace hypharm
