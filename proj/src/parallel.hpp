#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qfdiv::detail {

// Runs fn(k) for k in [begin, end) across worker threads. Work is split by
// index, so any output written to slot k is independent of scheduling. The
// first exception thrown by a worker is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn, bool concurrent = true) {
    if (end <= begin) return;
    const std::size_t count = end - begin;
    std::size_t workers = concurrent ? std::max(1u, std::thread::hardware_concurrency()) : 1;
    workers = std::min(workers, count);
    if (workers == 1) {
        for (std::size_t k = begin; k < end; ++k) fn(k);
        return;
    }

    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t k = begin + w; k < end; k += workers) fn(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace qfdiv::detail
