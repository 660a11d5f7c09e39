#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace poslp {

// Thread pool for data-parallel loops whose results must not depend on the
// thread count.  Work is split into fixed-size chunks (a function of n only);
// threads race for chunk indices, but each chunk is processed sequentially
// and chunk-level partial results are combined by the caller in chunk order,
// so sums reduce in one fixed association regardless of who ran what.
class ParallelRuntime {
 public:
  static constexpr std::size_t kChunk = 2048;

  explicit ParallelRuntime(int thread_count);
  ~ParallelRuntime();

  ParallelRuntime(const ParallelRuntime&) = delete;
  ParallelRuntime& operator=(const ParallelRuntime&) = delete;

  int thread_count() const { return thread_count_; }

  static std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

  // body(chunk_index, begin, end) over [0, n); returns after every chunk ran.
  void for_chunks(std::size_t n,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

 private:
  void worker_loop();

  int thread_count_ = 1;
  std::vector<std::thread> workers_;

  std::mutex mu_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t, std::size_t, std::size_t)>* job_ = nullptr;
  std::size_t job_n_ = 0;
  std::size_t job_chunks_ = 0;
  std::size_t next_chunk_ = 0;
  std::size_t busy_workers_ = 0;
  std::uint64_t epoch_ = 0;
  bool stopping_ = false;
};

}  // namespace poslp
