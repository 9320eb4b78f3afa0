#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace gasketlab {

/// Thread cap from GASKETLAB_THREADS (defaults to the hardware count).
inline unsigned thread_cap() {
    if (const char* env = std::getenv("GASKETLAB_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Index-parallel loop; results must be written to per-index slots so the
/// output is independent of scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    unsigned threads = std::min<std::size_t>(thread_cap(), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace gasketlab
