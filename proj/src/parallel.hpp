#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bellvar::detail {

inline unsigned resolve_jobs(unsigned jobs)
{
    if (jobs == 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    return jobs;
}

// Runs body(i) for i in [0, count). Callers store results by index, so the
// outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body)
{
    const unsigned workers = std::min<std::size_t>(resolve_jobs(jobs), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace bellvar::detail
