#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace lmesim::detail {

// Runs body(i) for i in [0, n) on up to `workers` threads.  Indices are
// handed out in order; if any body throws, the exception of the lowest
// failing index is rethrown after all threads join.
template <typename Body>
void parallel_for(int n, int workers, Body&& body) {
    workers = std::clamp(workers, 1, std::max(n, 1));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto run = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace lmesim::detail
