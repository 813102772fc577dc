#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace finsler::detail {

// Static round-robin split of [0, n) over `jobs` threads. Callers write
// results into pre-sized slots, so output order never depends on timing.
template <class F>
void parallel_for(int n, int jobs, F&& f)
{
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += jobs) f(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace finsler::detail
