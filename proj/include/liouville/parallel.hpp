#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace liouville {

// Worker count for batch sweeps: hardware concurrency capped by the
// LIOUVILLE_LAB_THREADS environment variable and by the job count.
inline int worker_count(int jobs) {
    if (jobs <= 1) return 1;
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* cap = std::getenv("LIOUVILLE_LAB_THREADS")) {
        try {
            const long v = std::stol(cap);
            if (v >= 1 && static_cast<unsigned>(v) < n) n = static_cast<unsigned>(v);
        } catch (...) {
            // unparsable cap: keep the hardware default
        }
    }
    return static_cast<int>(std::min<unsigned>(n, static_cast<unsigned>(jobs)));
}

// Run fn(i) for i in [0, n) on contiguous chunks.  Results must be written to
// disjoint slots by index so the outcome is independent of the thread count;
// if several calls throw, the one with the smallest index is rethrown.
template <typename Fn>
inline void parallel_for(int n, Fn&& fn) {
    const int workers = worker_count(n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(workers));
    std::vector<int> err_index(static_cast<std::size_t>(workers), -1);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = w * chunk, hi = std::min(n, lo + chunk);
        pool.emplace_back([&, w, lo, hi] {
            for (int i = lo; i < hi; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    errs[static_cast<std::size_t>(w)] = std::current_exception();
                    err_index[static_cast<std::size_t>(w)] = i;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    int first = -1;
    for (int w = 0; w < workers; ++w)
        if (err_index[static_cast<std::size_t>(w)] >= 0 &&
            (first < 0 || err_index[static_cast<std::size_t>(w)] < err_index[static_cast<std::size_t>(first)]))
            first = w;
    if (first >= 0) std::rethrow_exception(errs[static_cast<std::size_t>(first)]);
}

}  // namespace liouville
