#ifndef TROPICA_PARALLEL_HPP
#define TROPICA_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace tropica {

// TROPICA_THREADS caps the worker pool; default is the hardware count.
inline int worker_count() {
  if (const char* env = std::getenv("TROPICA_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

namespace detail {
constexpr std::size_t kParallelGrain = 4096;
}

// Runs body(i) for i in [0, n) over contiguous chunks, one per worker.
// Callers that collect results must write them to position i of a
// preallocated buffer so the outcome is independent of scheduling.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const int workers = worker_count();
  if (workers <= 1 || n < detail::kParallelGrain) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t chunk = (n + std::size_t(workers) - 1) / std::size_t(workers);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors{std::size_t(workers)};
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = std::size_t(w) * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, w, &body, &errors] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[std::size_t(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);  // first chunk in index order wins
}

// Deterministic map-reduce: each chunk folds locally in index order, then the
// partials combine in chunk order, so results never depend on interleaving.
template <class T, class Map, class Combine>
T parallel_map_reduce(std::size_t n, T init, Map&& map, Combine&& combine) {
  const int workers = worker_count();
  if (workers <= 1 || n < detail::kParallelGrain) {
    T acc = init;
    for (std::size_t i = 0; i < n; ++i) acc = combine(acc, map(i));
    return acc;
  }
  const std::size_t chunk = (n + std::size_t(workers) - 1) / std::size_t(workers);
  std::vector<T> partial(std::size_t(workers), init);
  std::vector<std::exception_ptr> errors{std::size_t(workers)};
  std::vector<std::thread> pool;
  int used = 0;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = std::size_t(w) * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    ++used;
    pool.emplace_back([lo, hi, w, &map, &combine, &partial, &errors] {
      try {
        T acc = partial[std::size_t(w)];
        for (std::size_t i = lo; i < hi; ++i) acc = combine(acc, map(i));
        partial[std::size_t(w)] = acc;
      } catch (...) {
        errors[std::size_t(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  T acc = init;
  for (int w = 0; w < used; ++w) acc = combine(acc, partial[std::size_t(w)]);
  return acc;
}

}  // namespace tropica

#endif
