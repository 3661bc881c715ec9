#pragma once

#include <atomic>
#include <chrono>
#include <functional>

#include "sentry/model.hpp"

namespace sentry {

// All timestamps flow through an injected clock so runs are reproducible.
using NowFn = std::function<Timestamp()>;

inline Timestamp system_now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// Settable logical clock for tests, the CLI's --clock flag and the
// deterministic scenario runs.
class LogicalClock {
 public:
  explicit LogicalClock(Timestamp start = 0) : now_(start) {}

  Timestamp now() const { return now_.load(std::memory_order_relaxed); }
  void set(Timestamp t) { now_.store(t, std::memory_order_relaxed); }
  void advance(Timestamp delta_ms) {
    now_.fetch_add(delta_ms, std::memory_order_relaxed);
  }

  NowFn as_fn() {
    return [this] { return now(); };
  }

 private:
  std::atomic<Timestamp> now_;
};

}  // namespace sentry
