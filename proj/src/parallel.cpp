#include "pqslab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pqslab {

namespace {

std::atomic<int> g_default_threads{0};

// Nested calls run serially on the calling worker.
thread_local bool t_inside_pool = false;

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PQSLAB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
      // Fall through to the hardware default.
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_default_threads(int threads) { g_default_threads.store(threads); }

int default_threads() { return resolve_threads(g_default_threads.load()); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int threads) {
  const int workers_wanted = threads > 0 ? threads : default_threads();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(workers_wanted), count);
  if (workers <= 1 || t_inside_pool) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    const bool outer = t_inside_pool;
    t_inside_pool = true;
    struct Restore {
      bool value;
      ~Restore() { t_inside_pool = value; }
    } restore{outer};
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pqslab
