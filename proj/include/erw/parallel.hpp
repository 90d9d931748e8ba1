// Deterministic block-parallel loops. Work is cut into fixed blocks whose
// results are combined in block order, so the answer does not depend on the
// number of threads.

#ifndef ERW_PARALLEL_HPP
#define ERW_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace erw {

inline std::size_t default_thread_count() {
    const auto n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

/// Calls body(block, begin, end) for consecutive blocks of [0, count) and
/// returns the per-block results in block order.
template <class R, class Body>
std::vector<R> run_blocks(std::uint64_t count, std::uint64_t block_size, Body body,
                          std::size_t threads = default_thread_count()) {
    if (block_size == 0) block_size = 1;
    const std::uint64_t blocks = (count + block_size - 1) / block_size;
    std::vector<R> out(blocks);
    auto one = [&](std::uint64_t b) {
        const auto begin = b * block_size;
        out[b] = body(b, begin, std::min(count, begin + block_size));
    };
    threads = static_cast<std::size_t>(std::min<std::uint64_t>(threads, blocks));
    if (threads <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) one(b);
        return out;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_lock;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::uint64_t b; (b = next.fetch_add(1)) < blocks;) {
                try {
                    one(b);
                } catch (...) {
                    std::lock_guard lock(error_lock);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace erw

#endif  // ERW_PARALLEL_HPP
