#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace perclab {

// Splits [0, total) into `workers` contiguous ranges and runs
// fn(worker, begin, end) for each, on its own thread when workers > 1. Callers
// keep per-worker accumulators and merge them in worker order afterwards.
template <class Fn>
void run_chunked(std::uint64_t total, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    if (total < workers) workers = static_cast<unsigned>(std::max<std::uint64_t>(1, total));
    auto range = [&](unsigned w) {
        return std::pair<std::uint64_t, std::uint64_t>{total * w / workers, total * (w + 1) / workers};
    };
    if (workers == 1) {
        fn(0u, std::uint64_t{0}, total);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                auto [begin, end] = range(w);
                fn(w, begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

inline unsigned worker_count(std::uint64_t total, unsigned requested) {
    requested = std::max(1u, requested);
    return static_cast<unsigned>(std::min<std::uint64_t>(requested, std::max<std::uint64_t>(1, total)));
}

}  // namespace perclab
