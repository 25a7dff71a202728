#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hasse::detail {

// Runs work(k) for k in [0, chunks) on up to `threads` workers and returns the
// results in chunk order. Chunk boundaries are fixed by the caller, so the
// outcome does not depend on scheduling.
template <class T, class F>
std::vector<T> run_chunks(int chunks, int threads, F&& work) {
    std::vector<T> out(static_cast<std::size_t>(chunks));
    threads = std::max(1, std::min(threads, chunks));
    if (threads == 1) {
        for (int k = 0; k < chunks; ++k) out[k] = work(k);
        return out;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int k; (k = next.fetch_add(1)) < chunks;) {
                try {
                    out[k] = work(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

// [lo, hi) split into `parts` contiguous ranges of near-equal length.
inline std::pair<long long, long long> split_range(long long lo, long long hi, int parts, int k) {
    const long long len = hi - lo;
    return {lo + len * k / parts, lo + len * (k + 1) / parts};
}

inline int default_threads() {
    if (const char* env = std::getenv("HASSE_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) return t;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace hasse::detail
