#include "mtwfit/math/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace mtwfit::math {

int resolve_workers(int requested) {
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("MTWFIT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task,
                  int workers) {
    const int w = resolve_workers(workers);
    if (n == 0)
        return;
    if (w <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i)
            task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load())
                return;
            try {
                task(i);
            } catch (...) {
                if (!failed.exchange(true))
                    error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int used = static_cast<int>(std::min<std::size_t>(w, n));
    pool.reserve(used - 1);
    for (int t = 1; t < used; ++t)
        pool.emplace_back(run);
    run();
    for (auto& th : pool)
        th.join();
    if (failed.load())
        std::rethrow_exception(error);
}

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& chunk_task,
                     int workers) {
    const int w = resolve_workers(workers);
    if (n == 0)
        return;
    const std::size_t chunks = std::min<std::size_t>(n, static_cast<std::size_t>(w));
    const std::size_t base = n / chunks;
    const std::size_t extra = n % chunks;
    parallel_for(
        chunks,
        [&](std::size_t c) {
            const std::size_t begin = c * base + std::min(c, extra);
            const std::size_t end = begin + base + (c < extra ? 1 : 0);
            chunk_task(begin, end);
        },
        workers);
}

} // namespace mtwfit::math
