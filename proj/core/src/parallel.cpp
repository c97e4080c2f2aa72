#include "delayfield/parallel.hpp"

#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace delayfield {

namespace {

int read_budget() {
  if (const char* env = std::getenv("DELAYFIELD_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Persistent pool: parallel_for is called once per simulation step, so thread
// spawn cost per call would dominate small steps.
class Pool {
 public:
  explicit Pool(int workers) : task_ranges_(workers) {
    for (int w = 1; w < workers; ++w)
      threads_.emplace_back([this, w] { worker_loop(w); });
  }

  ~Pool() {
    {
      std::unique_lock lk(m_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  int workers() const { return static_cast<int>(threads_.size()) + 1; }

  void run(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int w = workers();
    const std::size_t chunk = (n + w - 1) / w;
    {
      std::unique_lock lk(m_);
      fn_ = &fn;
      pending_ = 0;
      for (int i = 0; i < w; ++i) {
        const std::size_t b = std::min(n, chunk * static_cast<std::size_t>(i));
        const std::size_t e = std::min(n, b + chunk);
        task_ranges_[i] = {b, e};
        if (i > 0 && b < e) ++pending_;
      }
      ++epoch_;
    }
    cv_.notify_all();
    // worker 0 = caller
    if (task_ranges_[0].first < task_ranges_[0].second)
      fn(task_ranges_[0].first, task_ranges_[0].second);
    std::unique_lock lk(m_);
    done_cv_.wait(lk, [this] { return pending_ == 0; });
    fn_ = nullptr;
  }

 private:
  void worker_loop(int idx) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(std::size_t, std::size_t)>* fn = nullptr;
      std::pair<std::size_t, std::size_t> range{0, 0};
      {
        std::unique_lock lk(m_);
        cv_.wait(lk, [&] { return stop_ || epoch_ != seen; });
        if (stop_) return;
        seen = epoch_;
        range = task_ranges_[idx];
        fn = fn_;
      }
      if (fn && range.first < range.second) {
        (*fn)(range.first, range.second);
        std::unique_lock lk(m_);
        if (--pending_ == 0) done_cv_.notify_all();
      }
    }
  }

  std::vector<std::thread> threads_;
  std::vector<std::pair<std::size_t, std::size_t>> task_ranges_;
  const std::function<void(std::size_t, std::size_t)>* fn_ = nullptr;
  std::mutex m_;
  std::condition_variable cv_, done_cv_;
  std::uint64_t epoch_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

}  // namespace

int thread_budget() {
  static const int budget = read_budget();
  return budget;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  const int budget = thread_budget();
  if (budget <= 1 || n < 256) {
    if (n > 0) fn(0, n);
    return;
  }
  static Pool pool(thread_budget());
  pool.run(n, fn);
}

}  // namespace delayfield
