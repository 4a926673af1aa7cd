#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace stepfloq {

/// Number of worker threads to use; 0 means "one per hardware thread".
inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls f(i) for i in [0, count) on up to `threads` workers, each taking a
/// contiguous block. f must only write to per-index state; the first
/// exception thrown by any worker is rethrown on the caller's thread.
template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
    const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t block = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t begin = w * block;
                const std::size_t end = std::min(count, begin + block);
                for (std::size_t i = begin; i < end; ++i) f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Pairwise (tree) summation. The association order depends only on the
/// number of terms, so the result is bit-stable whatever produced them.
template <typename T>
T pairwise_sum(std::vector<T> terms) {
    if (terms.empty()) return T{};
    std::size_t n = terms.size();
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
        if (n % 2 == 1) terms[half] = terms[n - 1];
        n = half + n % 2;
    }
    return terms.front();
}

}  // namespace stepfloq
