#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace clt {

/// Runs fn(i) for i in [0, total) across up to `threads` workers. Each task
/// must write only to its own output slot; callers reduce in index order
/// afterwards, so results do not depend on the scheduling. The first exception
/// thrown by any task is rethrown on the calling thread.
template <typename Fn>
void parallel_for(long total, int threads, Fn&& fn) {
    if (total <= 0) return;
    const int workers = static_cast<int>(std::max(1L, std::min<long>(threads, total)));
    if (workers == 1) {
        for (long i = 0; i < total; ++i) fn(i);
        return;
    }

    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const long i = next.fetch_add(1);
                if (i >= total) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace clt
