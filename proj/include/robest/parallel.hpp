#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace robest {

// Runs fn(i) for i in [0, count). With jobs > 1 the range is split into
// contiguous chunks, one thread each; fn must write only to its own slot so
// results are identical for any job count.
inline void parallel_for(long count, int jobs, const std::function<void(long)>& fn) {
    if (count <= 0) return;
    const long workers = std::max(1L, std::min<long>(jobs, count));
    if (workers == 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    const long chunk = (count + workers - 1) / workers;
    for (long w = 0; w < workers; ++w) {
        const long begin = w * chunk;
        const long end = std::min(count, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([begin, end, &fn] {
            for (long i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace robest
