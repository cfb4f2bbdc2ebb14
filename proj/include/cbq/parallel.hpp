#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cbq {

/// Run fn(0..count-1) on up to `workers` threads and wait for all of them;
/// the join is the caller's barrier. The first exception thrown by a task is
/// rethrown here after every worker has stopped.
inline void parallel_for(unsigned workers, std::size_t count,
                         const std::function<void(std::size_t)>& fn) {
    if (count == 0) {
        return;
    }
    const std::size_t nthreads =
        std::max<std::size_t>(1, std::min<std::size_t>(workers, count));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr error;
    const auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count || failed.load(std::memory_order_relaxed)) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(nthreads - 1);
    for (std::size_t t = 0; t + 1 < nthreads; ++t) {
        threads.emplace_back(body);
    }
    body();
    for (std::thread& t : threads) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace cbq
