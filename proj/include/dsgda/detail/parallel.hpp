#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace dsgda {

template <class T>
std::vector<T> parallel_map(int n, int threads, const std::function<T(int)>& task) {
  std::vector<T> out(static_cast<std::size_t>(std::max(n, 0)));
  if (n <= 0) return out;
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) out[i] = task(i);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          out[i] = task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace dsgda
