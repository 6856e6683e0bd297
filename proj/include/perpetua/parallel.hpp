#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace perpetua {

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, n) across `workers` threads. Work items must be
/// independent; determinism is the caller's job (one generator stream per item,
/// results merged by item index).
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    const int w = std::min<std::size_t>(resolve_workers(workers), n == 0 ? 1 : n);
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) {
        threads.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : threads) th.join();
}

}  // namespace perpetua
