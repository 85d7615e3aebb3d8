#include "splitreg/parallel.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace splitreg {

namespace {

int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace

int resolve_thread_count(int requested) {
  if (requested < 0)
    throw InvalidInput("resolve_thread_count: thread count must be >= 0, got " +
                       std::to_string(requested));
  if (const char* env = std::getenv("SPLITREG_THREADS")) {
    const std::string text(env);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 0)
      throw InvalidInput("resolve_thread_count: SPLITREG_THREADS must be a nonnegative "
                         "integer, got \"" + text + "\"");
    requested = value;
  }
  if (requested == 0) return hardware_threads();
  return requested;
}

void parallel_for(Index count, int threads, const std::function<void(Index)>& body) {
  if (count <= 0) return;
  if (threads < 1) throw InvalidInput("parallel_for: threads must be >= 1");
  const int workers = static_cast<int>(std::min<Index>(threads, count));
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto run = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const Index i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace splitreg
