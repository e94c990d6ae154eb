#include "pwl/parallel.hpp"

#include <cstdlib>
#include <mutex>
#include <string>

namespace pwl {

int thread_budget() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("PWL_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    // The variable wins outright when set: it caps oversubscription in
    // deployment and lets tests force a worker count above the detected
    // core count to exercise merge determinism.
    if (end != env && cap >= 1 && cap < 1024) hw = static_cast<int>(cap);
  }
  return hw;
}

void parallel_for_index(long long n, const std::function<void(long long)>& fn) {
  if (n <= 0) return;
  const int workers = static_cast<int>(std::min<long long>(thread_budget(), n));
  if (workers == 1) {
    for (long long i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<long long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&]() {
    for (;;) {
      const long long i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pwl
