#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace packminer::detail {

//! Run f(0..n-1) on up to `threads` workers (0 = hardware concurrency).
//! Work items must be independent; results must not depend on scheduling.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& f)
{
    std::size_t n_threads = threads > 0 ? static_cast<std::size_t>(threads)
                                        : std::thread::hardware_concurrency();
    if (n_threads > n)
        n_threads = n;
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                f(i);
        });
    for (auto& th : pool)
        th.join();
}

} // namespace packminer::detail
