#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "desired/sim/rng.hpp"
#include "desired/sim/time.hpp"

namespace desired::sim {

struct Event {
  Time time = 0;
  std::uint64_t sequence = 0;
  NodeId target = kNoNode;
  std::function<void()> action;
};

class EventHandle {
 public:
  EventHandle() = default;
  explicit EventHandle(std::uint64_t sequence) : sequence_(sequence), valid_(true) {}
  std::uint64_t sequence() const noexcept { return sequence_; }
  bool valid() const noexcept { return valid_; }

 private:
  std::uint64_t sequence_ = 0;
  bool valid_ = false;
};

struct RunSummary {
  std::uint64_t dispatched = 0;
  Time final_time = 0;
};

class SchedulingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Single-threaded discrete-event engine. Events run in (time, sequence)
// order; sequence numbers are assigned at scheduling and never reused.
class Simulator {
 public:
  explicit Simulator(std::uint64_t master_seed = 1);

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  Time now() const noexcept { return now_; }
  std::uint64_t master_seed() const noexcept { return master_seed_; }

  /// Throws SchedulingError if \p at is earlier than now().
  EventHandle schedule(Time at, NodeId target, std::function<void()> action);
  EventHandle schedule(Time at, std::function<void()> action) {
    return schedule(at, kNoNode, std::move(action));
  }
  EventHandle schedule_in(Time delay, std::function<void()> action) {
    return schedule(now_ + delay, kNoNode, std::move(action));
  }

  /// Returns false if the event already ran or was cancelled.
  bool cancel(EventHandle handle);

  /// Dispatches every event with time <= t_end, then sets the clock to t_end.
  RunSummary run_until(Time t_end);

  /// Stream for \p label, created deterministically on first use.
  RngStream& rng_stream(std::string_view label);

  /// Monotone identifier source shared by everything in this simulation.
  std::uint64_t allocate_uid() noexcept { return next_uid_++; }

  std::size_t pending() const noexcept { return heap_.size() - cancelled_.size(); }
  std::uint64_t total_dispatched() const noexcept { return total_dispatched_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence > b.sequence;
    }
  };

  std::uint64_t master_seed_;
  Time now_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t total_dispatched_ = 0;
  std::uint64_t next_uid_ = 1;
  std::vector<Event> heap_;
  std::unordered_set<std::uint64_t> live_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::map<std::string, std::unique_ptr<RngStream>, std::less<>> streams_;
};

}  // namespace desired::sim
