#pragma once

#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

#include "wavekk/core.hpp"

namespace wavekk {

/// Thread cap: WAVEKK_THREADS when set, otherwise all cores.
inline unsigned max_threads() {
  if (const char* env = std::getenv("WAVEKK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 4096)
      throw InputError("WAVEKK_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

/// Runs fn(i) for i in [0, n) over a static partition. Each index writes
/// only its own outputs, so results are bitwise independent of the
/// partitioning.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t nthreads = std::min<std::size_t>(max_threads(), n == 0 ? 1 : n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nthreads);
  for (std::size_t j = 0; j < nthreads; ++j) {
    const std::size_t lo = n * j / nthreads;
    const std::size_t hi = n * (j + 1) / nthreads;
    pool.emplace_back([&, j, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace wavekk
