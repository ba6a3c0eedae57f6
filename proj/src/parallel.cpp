#include "dyadint/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace dyadint {

void parallel_chunks(std::size_t n, unsigned threads, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) {
        return;
    }
    // Small jobs are not worth a thread.
    constexpr std::size_t kMinChunk = 2048;
    const std::size_t max_useful = std::max<std::size_t>(1, n / kMinChunk);
    const std::size_t t = std::clamp<std::size_t>(threads, 1, max_useful);
    if (t == 1) {
        body(0, n);
        return;
    }
    std::vector<std::exception_ptr> errors(t);
    std::vector<std::thread> pool;
    pool.reserve(t);
    const std::size_t step = (n + t - 1) / t;
    for (std::size_t c = 0; c < t; ++c) {
        const std::size_t begin = std::min(n, c * step);
        const std::size_t end = std::min(n, begin + step);
        pool.emplace_back([&, c, begin, end] {
            try {
                if (begin < end) {
                    body(begin, end);
                }
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

unsigned threads_from_env(unsigned fallback) {
    if (const char* env = std::getenv("DYADINT_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1 && v <= 1024) {
                return static_cast<unsigned>(v);
            }
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return fallback;
}

} // namespace dyadint
