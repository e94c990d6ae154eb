#pragma once
// Deterministic parallelism over independent seeds.  Workers steal the next
// unclaimed index from a shared counter; results land in an index-addressed
// slot, so the merged output is ordered by seed index no matter how many
// threads ran or how work interleaved.  PWL_THREADS caps the worker count.

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace pwl {

// Worker count: hardware_concurrency by default; PWL_THREADS (1..1023)
// overrides it when set.
int thread_budget();

// Runs fn(i) for every i in [0, n), distributing indices over thread_budget()
// workers.  fn must only touch state owned by index i.  The first exception
// thrown by any worker is rethrown after all workers join.
void parallel_for_index(long long n, const std::function<void(long long)>& fn);

// Maps i -> fn(i) into a vector ordered by index (seed order), in parallel.
template <typename T>
std::vector<T> parallel_map_index(long long n, const std::function<T(long long)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(n));
  parallel_for_index(n, [&](long long i) { out[static_cast<std::size_t>(i)] = fn(i); });
  return out;
}

}  // namespace pwl
