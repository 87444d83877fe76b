#include "clonedetect/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace clonedetect {

int worker_thread_count() {
    const char* env = std::getenv("CLONEDETECT_THREADS");
    if (env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(long long count,
                     const std::function<void(long long, long long, long long)>& fn) {
    if (count <= 0) return;
    const long long chunks = (count + kParallelChunk - 1) / kParallelChunk;
    const int threads = static_cast<int>(std::min<long long>(worker_thread_count(), chunks));

    auto run_chunk = [&](long long ci) {
        const long long begin = ci * kParallelChunk;
        const long long end = std::min(count, begin + kParallelChunk);
        fn(ci, begin, end);
    };

    if (threads <= 1) {
        for (long long ci = 0; ci < chunks; ++ci) run_chunk(ci);
        return;
    }

    std::atomic<long long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const long long ci = next.fetch_add(1, std::memory_order_relaxed);
            if (ci >= chunks) return;
            try {
                run_chunk(ci);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads) - 1);
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace clonedetect
