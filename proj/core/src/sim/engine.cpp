#include "desired/sim/engine.hpp"

#include <algorithm>
#include <string>

namespace desired::sim {

Simulator::Simulator(std::uint64_t master_seed) : master_seed_(master_seed) {}

EventHandle Simulator::schedule(Time at, NodeId target, std::function<void()> action) {
  if (at < now_) {
    throw SchedulingError("event scheduled at t=" + std::to_string(at) +
                          "us, before current time " + std::to_string(now_) + "us");
  }
  const std::uint64_t seq = next_sequence_++;
  heap_.push_back(Event{at, seq, target, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  live_.insert(seq);
  return EventHandle(seq);
}

bool Simulator::cancel(EventHandle handle) {
  if (!handle.valid()) return false;
  if (live_.erase(handle.sequence()) == 0) return false;
  cancelled_.insert(handle.sequence());
  return true;
}

RunSummary Simulator::run_until(Time t_end) {
  RunSummary summary;
  while (!heap_.empty() && heap_.front().time <= t_end) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event ev = std::move(heap_.back());
    heap_.pop_back();
    if (cancelled_.erase(ev.sequence) != 0) continue;
    live_.erase(ev.sequence);
    now_ = ev.time;
    ++summary.dispatched;
    ++total_dispatched_;
    ev.action();
  }
  if (t_end > now_) now_ = t_end;
  summary.final_time = now_;
  return summary;
}

RngStream& Simulator::rng_stream(std::string_view label) {
  auto it = streams_.find(label);
  if (it == streams_.end()) {
    auto stream = std::make_unique<RngStream>(std::string(label), derive_seed(master_seed_, label));
    it = streams_.emplace(std::string(label), std::move(stream)).first;
  }
  return *it->second;
}

}  // namespace desired::sim
