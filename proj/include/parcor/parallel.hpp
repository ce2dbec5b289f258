#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

// Deterministic parallel map: work is split into fixed chunks, each chunk
// writes into its own slot, and slots are merged in index order.  Results
// are therefore identical for any worker count.

namespace parcor {

inline int effective_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

// body(i) is called for every i in [0, count), in parallel across chunks.
// body must only touch state indexed by i.
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    int nt = effective_threads(threads);
    if (nt <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const std::size_t chunk = std::max<std::size_t>(1, count / std::size_t(nt * 8));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int w = 0; w < nt; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t lo = next.fetch_add(chunk);
                if (lo >= count) return;
                std::size_t hi = std::min(count, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace parcor
