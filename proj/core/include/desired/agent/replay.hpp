#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "desired/sim/rng.hpp"
#include "desired/telemetry/observation.hpp"

namespace desired::agent {

using State = std::array<double, telemetry::kFeatureCount>;

struct Transition {
  State state{};
  std::uint8_t action = 0;
  double reward = 0.0;
  State next_state{};
};

// Ring buffer; storage grows on demand up to capacity, then the oldest entry
// is overwritten.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const Transition& at(std::size_t i) const { return items_.at(i); }

  /// \p k distinct indices drawn uniformly (Floyd's algorithm). Throws
  /// std::invalid_argument when k exceeds size().
  std::vector<std::size_t> sample_indices(std::size_t k, sim::RngStream& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> items_;
};

}  // namespace desired::agent
