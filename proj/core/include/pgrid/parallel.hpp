#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pgrid {

/// Worker-pool degree: PGRID_THREADS when set, hardware concurrency otherwise.
inline int default_parallelism() {
    if (const char* env = std::getenv("PGRID_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Run fn(i) for i in [0, count) on a bounded pool. Results are the
/// caller's responsibility (index into a preallocated vector); the first
/// exception is rethrown after all workers join, so output stays merged in
/// input order.
inline void parallel_for(int count, const std::function<void(int)>& fn,
                         int max_threads = 0) {
    const int workers = std::min(count, max_threads > 0 ? max_threads : default_parallelism());
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace pgrid
