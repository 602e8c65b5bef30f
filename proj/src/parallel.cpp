#include "phaselens/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace phaselens {

std::size_t worker_count() {
  if (const char* env = std::getenv("PHASELENS_THREADS")) {
    std::size_t n = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, n);
    if (ec == std::errc() && ptr == end && n > 0) return n;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_chunks(std::size_t total, std::size_t chunk_count,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (total == 0) return;
  chunk_count = std::clamp<std::size_t>(chunk_count, 1, total);
  const std::size_t step = (total + chunk_count - 1) / chunk_count;
  chunk_count = (total + step - 1) / step;

  const std::size_t workers = std::min(worker_count(), chunk_count);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunk_count; ++c) {
      body(c, c * step, std::min(total, (c + 1) * step));
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunk_count; c = next++) {
        try {
          body(c, c * step, std::min(total, (c + 1) * step));
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace phaselens
