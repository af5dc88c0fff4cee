#pragma once
// Minimal deterministic parallel-for.  Each index writes only its own output
// slot, so the result is identical for any thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace esl {

inline unsigned effective_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ESL_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return unsigned(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Global worker-count knob set once by the CLI; library default is 1 thread
// unless ESL_THREADS says otherwise.
inline unsigned& thread_count() {
    static unsigned n = effective_threads(0);
    return n;
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned nt = std::min<std::size_t>(thread_count(), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace esl
