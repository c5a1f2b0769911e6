#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace nsverify {

/// Worker count: NSVERIFY_THREADS if set and valid, otherwise 1.
inline int thread_count() {
    if (const char* env = std::getenv("NSVERIFY_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return 1;
}

/// Runs fn(i) for i in [0,n). Chunks are static and results must be written to
/// per-index slots so the outcome is independent of the worker count.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    const int workers = std::min(thread_count(), std::max(1, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([=, &fn] {
            for (int i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace nsverify
