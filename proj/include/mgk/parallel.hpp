#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mgk {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Each
/// index writes only its own output slot, so results do not depend on
/// scheduling. The first exception thrown is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::mutex mu;
    std::size_t next = 0;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(mu);
                if (next >= n || error) return;
                i = next++;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace mgk
