#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace crowdsim {

/// Shared work published by one worker for others to help with. `run` must
/// not block and must not publish further tasks. The pool increments
/// `*visitors` (under the queue lock) before running a task it dequeued and
/// decrements it afterwards, so the publisher knows when the context is no
/// longer referenced.
struct SharedTask {
  void (*run)(void* context) = nullptr;
  void* context = nullptr;
  std::atomic<std::uint32_t>* visitors = nullptr;
};

/// Fixed set of workers (the calling thread acts as worker 0) executing
/// index-parallel loops. While a loop is running each worker also owns a
/// task deque: the owner publishes and retracts at the back, idle workers
/// steal from the front.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t worker_count)
      : queues_(std::max<std::size_t>(worker_count, 1)) {
    for (auto& q : queues_) {
      q = std::make_unique<TaskQueue>();
    }
    threads_.reserve(queues_.size() - 1);
    for (std::size_t w = 1; w < queues_.size(); ++w) {
      threads_.emplace_back([this, w] { thread_main(w); });
    }
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) {
      t.join();
    }
  }

  std::size_t size() const { return queues_.size(); }

  /// Calls body(index, worker) for each index in [0, count). Indices are
  /// handed out in blocks of `grain` from a shared counter. Returns once every
  /// index has completed; tasks published by a body must be drained (or
  /// retracted) by that body before it returns.
  template <typename Body>
  void parallel_for(std::size_t count, std::size_t grain, Body&& body) {
    if (count == 0) {
      return;
    }
    grain = std::max<std::size_t>(grain, 1);
    if (size() == 1) {
      for (std::size_t i = 0; i < count; ++i) {
        body(i, std::size_t{0});
      }
      return;
    }

    std::function<void(std::size_t, std::size_t)> job = [&body](std::size_t i, std::size_t w) {
      body(i, w);
    };
    {
      std::lock_guard lock(mutex_);
      job_ = &job;
      job_count_ = count;
      job_grain_ = grain;
      next_index_.store(0, std::memory_order_relaxed);
      runners_.store(size(), std::memory_order_relaxed);
      finished_ = 0;
      ++generation_;
    }
    wake_.notify_all();

    participate(0);

    std::unique_lock lock(mutex_);
    done_.wait(lock, [this] { return finished_ == size() - 1; });
    job_ = nullptr;
  }

  void publish(std::size_t worker, const SharedTask& task) {
    TaskQueue& q = *queues_[worker];
    std::lock_guard lock(q.mutex);
    q.tasks.push_back(task);
  }

  /// Removes the most recently published task of `worker` if nobody took it.
  bool retract(std::size_t worker) {
    TaskQueue& q = *queues_[worker];
    std::lock_guard lock(q.mutex);
    if (q.tasks.empty()) {
      return false;
    }
    q.tasks.pop_back();
    return true;
  }

  /// Runs one queued task (own first, then stolen); false if none was found.
  bool run_one(std::size_t worker) {
    SharedTask task;
    if (take(worker, true, task)) {
      execute(task);
      return true;
    }
    for (std::size_t offset = 1; offset < size(); ++offset) {
      if (take((worker + offset) % size(), false, task)) {
        execute(task);
        return true;
      }
    }
    return false;
  }

 private:
  struct TaskQueue {
    std::mutex mutex;
    std::deque<SharedTask> tasks;
  };

  bool take(std::size_t owner, bool from_back, SharedTask& out) {
    TaskQueue& q = *queues_[owner];
    std::lock_guard lock(q.mutex);
    if (q.tasks.empty()) {
      return false;
    }
    if (from_back) {
      out = q.tasks.back();
      q.tasks.pop_back();
    } else {
      out = q.tasks.front();
      q.tasks.pop_front();
    }
    out.visitors->fetch_add(1, std::memory_order_relaxed);
    return true;
  }

  static void execute(const SharedTask& task) {
    task.run(task.context);
    task.visitors->fetch_sub(1, std::memory_order_release);
  }

  void participate(std::size_t worker) {
    const auto& job = *job_;
    for (;;) {
      const std::size_t begin = next_index_.fetch_add(job_grain_, std::memory_order_relaxed);
      if (begin >= job_count_) {
        break;
      }
      const std::size_t end = std::min(job_count_, begin + job_grain_);
      for (std::size_t i = begin; i < end; ++i) {
        job(i, worker);
      }
    }
    runners_.fetch_sub(1, std::memory_order_acq_rel);
    // Out of indices: help the workers that are still busy.
    while (runners_.load(std::memory_order_acquire) != 0) {
      if (!run_one(worker)) {
        std::this_thread::yield();
      }
    }
  }

  void thread_main(std::size_t worker) {
    std::uint64_t seen = 0;
    for (;;) {
      {
        std::unique_lock lock(mutex_);
        wake_.wait(lock, [&] { return stopping_ || generation_ != seen; });
        if (stopping_) {
          return;
        }
        seen = generation_;
      }
      participate(worker);
      {
        std::lock_guard lock(mutex_);
        ++finished_;
      }
      done_.notify_one();
    }
  }

  std::vector<std::unique_ptr<TaskQueue>> queues_;
  std::vector<std::thread> threads_;

  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  bool stopping_ = false;
  std::uint64_t generation_ = 0;
  std::size_t finished_ = 0;

  const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
  std::size_t job_count_ = 0;
  std::size_t job_grain_ = 1;
  std::atomic<std::size_t> next_index_{0};
  std::atomic<std::size_t> runners_{0};
};

}  // namespace crowdsim
