#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace insider {

/// Splits [0, n) into a fixed number of blocks (independent of the thread
/// count) and runs fn(block_index, begin, end) for each. Results merged in
/// block order are therefore identical for any number of workers.
template <class Fn>
void for_each_block(std::size_t n, std::size_t n_blocks, Fn&& fn) {
    n_blocks = std::max<std::size_t>(1, std::min(n_blocks, n));
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n_blocks));
    auto run_block = [&](std::size_t blk) {
        const std::size_t begin = n * blk / n_blocks;
        const std::size_t end = n * (blk + 1) / n_blocks;
        fn(blk, begin, end);
    };
    if (workers == 1) {
        for (std::size_t blk = 0; blk < n_blocks; ++blk) run_block(blk);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t blk = w; blk < n_blocks; blk += workers) run_block(blk);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

inline constexpr std::size_t kDefaultBlocks = 64;

}  // namespace insider
