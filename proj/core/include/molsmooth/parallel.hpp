#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace molsmooth {

/// Fixed-size worker pool for data-parallel loops.
///
/// `for_each_chunk` partitions [0, count) into contiguous chunks that depend
/// only on `count` and the chunk size, never on the number of workers, so a
/// kernel that writes disjoint outputs per index produces identical results
/// for any thread count.
class ThreadPool {
public:
  /// `threads == 0` selects std::thread::hardware_concurrency().
  explicit ThreadPool(unsigned threads = 0);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned size() const noexcept { return static_cast<unsigned>(workers_.size()) + 1; }

  /// Calls `fn(begin, end)` for each chunk of [0, count); blocks until done.
  /// The first exception thrown by any chunk is rethrown on the caller.
  void for_each_chunk(std::size_t count, std::size_t chunk,
                      const std::function<void(std::size_t, std::size_t)>& fn);

private:
  void worker_loop();
  void drain();

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
  std::size_t count_ = 0;
  std::size_t chunk_ = 1;
  std::size_t next_ = 0;
  std::size_t active_ = 0;
  std::size_t generation_ = 0;
  std::exception_ptr error_;
  bool stop_ = false;
};

}  // namespace molsmooth
