#include "permanental/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace perm {

int default_workers() {
  const char* env = std::getenv("PERM_WORKERS");
  if (!env) return 1;
  try {
    const int w = std::stoi(env);
    return w >= 1 ? w : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

void parallel_for(long count, int workers, const std::function<void(long)>& task) {
  if (count <= 0) return;
  workers = int(std::clamp<long>(workers, 1, count));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  long error_index = count;
  std::mutex error_mutex;
  auto run = [&] {
    for (long i = next++; i < count && !failed; i = next++) {
      try {
        task(i);
      } catch (...) {
        // Keep the failure with the smallest index so the reported error is
        // the one a sequential run would raise.
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace perm
