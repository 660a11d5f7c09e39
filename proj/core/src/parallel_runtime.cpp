#include "poslp/parallel_runtime.hpp"

#include <algorithm>

namespace poslp {

ParallelRuntime::ParallelRuntime(int thread_count)
    : thread_count_(std::max(1, thread_count)) {
  for (int t = 1; t < thread_count_; ++t) {
    workers_.emplace_back([this] { worker_loop(); });
  }
}

ParallelRuntime::~ParallelRuntime() {
  {
    std::unique_lock<std::mutex> lk(mu_);
    stopping_ = true;
  }
  start_cv_.notify_all();
  for (auto& w : workers_) w.join();
}

void ParallelRuntime::worker_loop() {
  std::uint64_t seen_epoch = 0;
  for (;;) {
    std::unique_lock<std::mutex> lk(mu_);
    start_cv_.wait(lk, [&] { return stopping_ || epoch_ != seen_epoch; });
    if (stopping_) return;
    seen_epoch = epoch_;
    ++busy_workers_;
    while (next_chunk_ < job_chunks_) {
      const std::size_t chunk = next_chunk_++;
      lk.unlock();
      const std::size_t begin = chunk * kChunk;
      const std::size_t end = std::min(begin + kChunk, job_n_);
      (*job_)(chunk, begin, end);
      lk.lock();
    }
    --busy_workers_;
    if (busy_workers_ == 0) done_cv_.notify_all();
  }
}

void ParallelRuntime::for_chunks(
    std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t chunks = chunk_count(n);
  if (workers_.empty() || chunks == 1) {
    for (std::size_t chunk = 0; chunk < chunks; ++chunk) {
      const std::size_t begin = chunk * kChunk;
      body(chunk, begin, std::min(begin + kChunk, n));
    }
    return;
  }

  std::unique_lock<std::mutex> lk(mu_);
  job_ = &body;
  job_n_ = n;
  job_chunks_ = chunks;
  next_chunk_ = 0;
  ++epoch_;
  start_cv_.notify_all();
  // The calling thread pulls chunks too.
  while (next_chunk_ < job_chunks_) {
    const std::size_t chunk = next_chunk_++;
    lk.unlock();
    const std::size_t begin = chunk * kChunk;
    const std::size_t end = std::min(begin + kChunk, job_n_);
    body(chunk, begin, end);
    lk.lock();
  }
  done_cv_.wait(lk, [&] { return busy_workers_ == 0; });
  job_ = nullptr;
}

}  // namespace poslp
