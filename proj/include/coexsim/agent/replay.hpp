#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "coexsim/sim/rng.hpp"

namespace coexsim::agent {

// One stored interaction. State vectors are kept at the maximum width; only
// the first `dim` entries are meaningful.
struct Transition {
  static constexpr int kMaxDim = 9;

  std::array<double, kMaxDim> state{};
  std::array<double, kMaxDim> next_state{};
  int dim = kMaxDim;
  int action = 0;
  double reward = 0.0;
  bool terminal = false;
};

// Fixed-capacity ring buffer with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
    storage_.reserve(capacity_);
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return storage_.size(); }

  void push(const Transition& t) {
    if (storage_.size() < capacity_) {
      storage_.push_back(t);
    } else {
      storage_[write_] = t;
    }
    write_ = (write_ + 1) % capacity_;
  }

  // Draws `count` transitions uniformly with replacement.
  std::vector<Transition> sample(std::size_t count, sim::RngStream& rng) const {
    if (storage_.size() < count) {
      throw std::logic_error("replay buffer holds fewer transitions than requested");
    }
    std::vector<Transition> batch;
    batch.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto idx = rng.next_below_inclusive(static_cast<std::uint64_t>(storage_.size()) - 1);
      batch.push_back(storage_[static_cast<std::size_t>(idx)]);
    }
    return batch;
  }

 private:
  std::size_t capacity_;
  std::size_t write_ = 0;
  std::vector<Transition> storage_;
};

}  // namespace coexsim::agent
