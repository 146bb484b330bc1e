#ifndef MVFLOW_PARALLEL_HPP
#define MVFLOW_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace mvflow {

// MVFLOW_THREADS caps the worker count; defaults to hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("MVFLOW_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 2 : static_cast<int>(hw);
}

// index-ordered results, scheduling-independent outputs
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    size_t workers = std::min(static_cast<size_t>(worker_count()), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    std::atomic<size_t> next{0};
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace mvflow

#endif
