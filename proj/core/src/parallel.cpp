#include "binpick/parallel.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace binpick {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const int nt = std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)),
                                       n == 0 ? 1 : n);
  if (nt <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  const std::size_t block = std::max<std::size_t>(std::size_t{1}, n / (4 * static_cast<std::size_t>(nt)));

  auto worker = [&]() {
    for (;;) {
      const std::size_t begin = next.fetch_add(block);
      if (begin >= n || failed.load()) return;
      const std::size_t end = std::min(n, begin + block);
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt) - 1);
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace binpick
