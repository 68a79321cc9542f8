#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace lexmatcher {

/// Hardware default when the caller passes threads <= 0.
inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end) over contiguous chunks of [0, n). The partitioning is
/// fixed by (n, threads) alone, so any fold over per-index results stays
/// identical to the sequential run.
template <typename Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n == 0) return;
    if (threads <= 1 || n < 2048) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        std::size_t begin = static_cast<std::size_t>(t) * chunk;
        if (begin >= n) break;
        std::size_t end = std::min(n, begin + chunk);
        workers.emplace_back([begin, end, &fn] { fn(begin, end); });
    }
    for (std::thread& w : workers) w.join();
}

} // namespace lexmatcher
