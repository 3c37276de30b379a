#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>

#include "asyncopt/errors.hpp"
#include "asyncopt/types.hpp"

namespace asyncopt {

/// Bounded store of recent iterates x_{k-cap+1}..x_k, indexed by iteration.
/// Reads of evicted iterates throw InvariantError.
class HistoryRing {
 public:
  explicit HistoryRing(std::int64_t capacity)
      : capacity_(std::max<std::int64_t>(1, capacity)) {}

  void push(Vec x) {
    slots_.push_back(std::move(x));
    ++next_index_;
    if (static_cast<std::int64_t>(slots_.size()) > capacity_) slots_.pop_front();
  }

  const Vec& at(std::int64_t index) const {
    const std::int64_t newest_idx = next_index_ - 1;
    const std::int64_t oldest_idx = next_index_ - static_cast<std::int64_t>(slots_.size());
    if (index < oldest_idx || index > newest_idx)
      throw InvariantError("history ring: iterate " + std::to_string(index) + " was evicted");
    return slots_[static_cast<std::size_t>(index - oldest_idx)];
  }

  std::int64_t newest() const { return next_index_ - 1; }

 private:
  std::int64_t capacity_ = 1;
  std::int64_t next_index_ = 0;
  std::deque<Vec> slots_;
};

}  // namespace asyncopt
