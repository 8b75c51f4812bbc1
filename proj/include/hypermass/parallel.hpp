#pragma once

// Small persistent worker pool for node-parallel loops.  Work is split into
// a fixed number of contiguous chunks; callers combine per-chunk results in
// chunk order, so outputs do not depend on scheduling.

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hypermass {

/// Worker cap from HYPERMASS_THREADS (defaults to hardware concurrency, >= 1).
int configured_workers();

class WorkerPool {
 public:
  explicit WorkerPool(int workers = configured_workers());
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int workers() const { return static_cast<int>(threads_.size()) + 1; }

  /// Calls fn(chunk) for chunk in [0, n_chunks); blocks until all are done.
  void run(int n_chunks, const std::function<void(int)>& fn);

 private:
  void worker_loop();

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_work_;
  std::condition_variable cv_done_;
  const std::function<void(int)>* job_ = nullptr;
  int n_chunks_ = 0;
  int next_ = 0;
  int pending_ = 0;
  unsigned generation_ = 0;
  bool stop_ = false;
};

/// Contiguous [begin, end) of chunk `c` out of `n_chunks` over n items.
inline std::pair<std::size_t, std::size_t> chunk_range(std::size_t n, int n_chunks, int c) {
  const std::size_t nc = static_cast<std::size_t>(n_chunks);
  const std::size_t cc = static_cast<std::size_t>(c);
  return {n * cc / nc, n * (cc + 1) / nc};
}

}  // namespace hypermass
