#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vcontract::detail {

inline unsigned worker_count(unsigned requested, std::size_t jobs) {
    unsigned w = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(w, jobs)));
}

// body(worker, i) for i in [0, n); blocks of 64 handed out in order.
template <class F>
void parallel_for(unsigned requested, std::size_t n, F&& body) {
    const unsigned w = worker_count(requested, n);
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(0u, i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < w; ++k) {
        pool.emplace_back([&, k] {
            try {
                for (;;) {
                    const std::size_t begin = next.fetch_add(64);
                    if (begin >= n || failed) break;
                    for (std::size_t i = begin; i < std::min(n, begin + 64); ++i) body(k, i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
                failed = true;
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace vcontract::detail
