#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace rest {

// Runs fn(i) for i in [0, n) over at most `workers` threads. Each index is
// processed exactly once; callers write results into per-index slots and
// reduce in index order, so outcomes never depend on scheduling.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = std::min(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace rest
