#pragma once

// Index-parallel loops with results written to caller-owned slots, so the
// output never depends on the schedule.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qsrc::parallel {

namespace detail {
inline std::atomic<unsigned>& limit() {
    static std::atomic<unsigned> value{0};
    return value;
}
}  // namespace detail

/// 0 means "hardware concurrency".
inline void set_thread_limit(unsigned n) { detail::limit().store(n); }

inline unsigned thread_count() {
    unsigned n = detail::limit().load();
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

template <class F>
void for_each_index(std::size_t n, F&& f) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(failure_lock);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace qsrc::parallel
