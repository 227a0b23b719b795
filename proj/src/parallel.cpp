#include "latshell/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace latshell {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LATSHELL_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void run_chunked(std::int64_t n_chunks, int workers,
                 const std::function<void(std::int64_t)>& chunk_fn) {
    if (n_chunks <= 0) return;
    workers = resolve_workers(workers);
    if (workers <= 1 || n_chunks == 1) {
        for (std::int64_t i = 0; i < n_chunks; ++i) chunk_fn(i);
        return;
    }
    const int n_threads = static_cast<int>(std::min<std::int64_t>(workers, n_chunks));
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= n_chunks || failed.load()) return;
            try {
                chunk_fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace latshell
