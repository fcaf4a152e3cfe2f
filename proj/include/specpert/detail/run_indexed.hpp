#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace specpert {

template <typename R, typename F>
std::vector<R> run_indexed(std::size_t count, int workers, const F& body) {
  std::vector<R> results(count);
  const std::size_t w = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (w <= 1) {
    for (std::size_t k = 0; k < count; ++k) results[k] = body(k);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < count && !failed; k = next++) {
          try {
            results[k] = body(k);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            failed = true;
          }
        }
      });
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace specpert
