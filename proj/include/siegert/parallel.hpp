#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace siegert {

// Worker count from SIEGERT_THREADS; defaults to 1.
inline unsigned thread_count() {
    if (const char* env = std::getenv("SIEGERT_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n > 0) return static_cast<unsigned>(std::min<long>(n, 256));
        } catch (...) {
        }
    }
    return 1;
}

// Runs body(i) for i in [0, n). Results must be written to per-index slots so
// the outcome is independent of scheduling.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, unsigned threads = thread_count()) {
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += threads) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace siegert
