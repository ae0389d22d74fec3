#pragma once

// Fixed-size worker pool over an index range. Results land in input order,
// so the output does not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gapforge {

template <class Result, class Job>
std::vector<Result> parallel_map(std::size_t count, int workers, Job&& job) {
  std::vector<Result> out(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto drain = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        out[k] = job(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  std::vector<std::thread> threads;
  for (int t = 1; t < n; ++t) threads.emplace_back(drain);
  drain();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace gapforge
