#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "hawkes/errors.hpp"

namespace hawkes {

// One event: a time in hours since the start of the observation window and
// a 0-based dimension (stream) index. External formats are 1-based; the
// conversion happens at the serialisation boundary only.
struct Event {
  double time{0.0};
  int dim{0};
};

// Immutable validated event log over a window (0, horizon].
class EventLog {
 public:
  EventLog(std::vector<Event> events, double horizon, int num_dims)
      : events_(std::move(events)), horizon_(horizon), num_dims_(num_dims) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw contract_error("event log horizon must be finite and > 0");
    }
    if (num_dims < 1) {
      throw contract_error("event log needs at least one dimension");
    }
    for (std::size_t i = 0; i < events_.size(); ++i) {
      const Event& e = events_[i];
      if (!(e.time >= 0.0) || !(e.time <= horizon_)) {
        throw structural_error("event " + std::to_string(i + 1) +
                               " time outside [0, horizon]");
      }
      if (e.dim < 0 || e.dim >= num_dims_) {
        throw structural_error("event " + std::to_string(i + 1) +
                               " dimension out of range");
      }
      if (i > 0 && !(events_[i - 1].time < e.time)) {
        throw structural_error("event times must be strictly increasing "
                               "(violated at event " +
                               std::to_string(i + 1) + ")");
      }
    }
  }

  [[nodiscard]] int size() const noexcept {
    return static_cast<int>(events_.size());
  }
  [[nodiscard]] bool empty() const noexcept { return events_.empty(); }
  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] int num_dims() const noexcept { return num_dims_; }

  [[nodiscard]] const Event& operator[](int i) const { return events_[i]; }
  [[nodiscard]] double time(int i) const { return events_[i].time; }
  [[nodiscard]] int dim(int i) const { return events_[i].dim; }
  [[nodiscard]] const std::vector<Event>& events() const noexcept {
    return events_;
  }

  [[nodiscard]] std::vector<int> count_per_dim() const {
    std::vector<int> n(num_dims_, 0);
    for (const Event& e : events_) ++n[e.dim];
    return n;
  }

  // Events restricted to one dimension, same horizon (single-dim log).
  [[nodiscard]] EventLog restrict_to_dim(int d) const {
    if (d < 0 || d >= num_dims_) throw contract_error("dimension out of range");
    std::vector<Event> sub;
    for (const Event& e : events_) {
      if (e.dim == d) sub.push_back({e.time, 0});
    }
    return EventLog(std::move(sub), horizon_, 1);
  }

 private:
  std::vector<Event> events_;
  double horizon_;
  int num_dims_;
};

}  // namespace hawkes
