#include "nnxml/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace nnxml {
namespace {

std::atomic<std::size_t> g_threads{0};

// Below this many rows the thread start-up cost dominates.
constexpr std::size_t kMinRowsPerThread = 64;

}  // namespace

std::size_t num_threads() {
  std::size_t n = g_threads.load();
  if (n == 0) n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  return n;
}

void set_num_threads(std::size_t n) { g_threads.store(n); }

void parallel_for_rows(std::size_t n,
                       const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers =
      std::min(num_threads(), std::max<std::size_t>(1, n / kMinRowsPerThread));
  if (workers <= 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

double deterministic_row_sum(std::size_t n,
                             const std::function<double(std::size_t)>& row_value) {
  std::vector<double> partial(n, 0.0);
  parallel_for_rows(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) partial[i] = row_value(i);
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace nnxml
