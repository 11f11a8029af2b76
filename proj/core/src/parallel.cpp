#include "molsmooth/parallel.hpp"

#include <algorithm>
#include <exception>
#include <utility>

namespace molsmooth {

ThreadPool::ThreadPool(unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  workers_.reserve(threads - 1);
  for (unsigned i = 1; i < threads; ++i) workers_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& w : workers_) w.join();
}

void ThreadPool::for_each_chunk(std::size_t count, std::size_t chunk,
                                const std::function<void(std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  if (workers_.empty() || count <= chunk) {
    for (std::size_t b = 0; b < count; b += chunk) fn(b, std::min(count, b + chunk));
    return;
  }
  {
    std::lock_guard lock(mutex_);
    job_ = &fn;
    count_ = count;
    chunk_ = chunk;
    next_ = 0;
    error_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();
  drain();
  std::unique_lock lock(mutex_);
  done_.wait(lock, [this] { return next_ >= count_ && active_ == 0; });
  job_ = nullptr;
  if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
}

void ThreadPool::drain() {
  for (;;) {
    std::size_t begin;
    std::size_t end;
    const std::function<void(std::size_t, std::size_t)>* job;
    {
      std::lock_guard lock(mutex_);
      if (job_ == nullptr || next_ >= count_) return;
      begin = next_;
      end = std::min(count_, begin + chunk_);
      next_ = end;
      ++active_;
      job = job_;
    }
    try {
      (*job)(begin, end);
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      --active_;
    }
    done_.notify_all();
  }
}

void ThreadPool::worker_loop() {
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || (generation_ != seen && job_ != nullptr); });
      if (stop_) return;
      seen = generation_;
    }
    drain();
  }
}

}  // namespace molsmooth
