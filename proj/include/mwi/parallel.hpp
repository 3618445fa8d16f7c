#pragma once
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace mwi {

// Process-wide worker count (set once from the CLI; defaults to the hardware).
int thread_count();
void set_thread_count(int n);

// Runs f(i) for i in [0, n). Each index owns its output slot, so results are
// identical for any thread count; reductions must happen after the loop in
// index order.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
    int workers = thread_count();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            f(i);
        }
    };
    std::vector<std::thread> pool;
    int spawn = static_cast<int>(std::min<std::size_t>(workers, n));
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace mwi
