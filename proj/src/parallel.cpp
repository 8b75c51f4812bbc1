#include "hypermass/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace hypermass {

int configured_workers() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("HYPERMASS_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) return std::min(cap, hw);
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return hw;
}

WorkerPool::WorkerPool(int workers) {
  const int extra = std::max(0, workers - 1);
  threads_.reserve(static_cast<std::size_t>(extra));
  for (int i = 0; i < extra; ++i) threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lk(mu_);
    stop_ = true;
  }
  cv_work_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run(int n_chunks, const std::function<void(int)>& fn) {
  if (threads_.empty() || n_chunks <= 1) {
    for (int c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::unique_lock lk(mu_);
  job_ = &fn;
  n_chunks_ = n_chunks;
  next_ = 0;
  pending_ = n_chunks;
  ++generation_;
  cv_work_.notify_all();
  // The calling thread takes chunks too.
  while (next_ < n_chunks_) {
    const int c = next_++;
    lk.unlock();
    fn(c);
    lk.lock();
    --pending_;
  }
  cv_done_.wait(lk, [this] { return pending_ == 0; });
  job_ = nullptr;
}

void WorkerPool::worker_loop() {
  unsigned seen = 0;
  std::unique_lock lk(mu_);
  for (;;) {
    cv_work_.wait(lk, [&] { return stop_ || (generation_ != seen && job_ != nullptr && next_ < n_chunks_); });
    if (stop_) return;
    seen = generation_;
    while (job_ != nullptr && next_ < n_chunks_) {
      const int c = next_++;
      const auto* job = job_;
      lk.unlock();
      (*job)(c);
      lk.lock();
      if (--pending_ == 0) cv_done_.notify_all();
    }
  }
}

}  // namespace hypermass
