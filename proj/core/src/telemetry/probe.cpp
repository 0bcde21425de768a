#include "desired/telemetry/probe.hpp"

#include <algorithm>
#include <stdexcept>

namespace desired::telemetry {

ProbeEmitter::ProbeEmitter(sim::Simulator& sim, sim::Host& source, sim::NodeId destination,
                           Time period, std::uint32_t base_bytes)
    : sim_(sim), source_(source), destination_(destination), period_(period), base_bytes_(base_bytes) {
  if (period_ <= 0) throw std::invalid_argument("probe period must be positive");
}

void ProbeEmitter::start(Time first, Time stop) {
  stop_ = stop;
  if (first > stop_) return;
  sim_.schedule(first, source_.id(), [this] { emit(); });
}

void ProbeEmitter::emit() {
  sim::Packet p;
  p.kind = sim::PacketKind::kProbe;
  p.dst = destination_;
  p.size_bytes = base_bytes_;
  p.seq = sent();
  p.sent_at = sim_.now();
  send_times_.push_back(sim_.now());
  source_.send(std::move(p));
  const Time next = sim_.now() + period_;
  if (next <= stop_) sim_.schedule(next, source_.id(), [this] { emit(); });
}

std::int64_t ProbeEmitter::sent_between(Time from, Time to) const {
  const auto lo = std::lower_bound(send_times_.begin(), send_times_.end(), from);
  const auto hi = std::lower_bound(send_times_.begin(), send_times_.end(), to);
  return hi - lo;
}

ProbeCollector::ProbeCollector(sim::Host& sink) {
  sink.set_kind_handler(sim::PacketKind::kProbe, [this, &sink](const sim::Packet& p) {
    CollectedProbe c;
    c.seq = p.seq;
    c.sent_at = p.sent_at;
    c.received_at = sink.sim().now();
    if (!p.telemetry.empty()) c.records = decode_int(p.telemetry);
    probes_.push_back(std::move(c));
    if (observer_) observer_(probes_.back());
  });
}

std::span<const CollectedProbe> ProbeCollector::received_between(Time from, Time to) const {
  auto by_time = [](const CollectedProbe& c, Time t) { return c.received_at < t; };
  const auto lo = std::lower_bound(probes_.begin(), probes_.end(), from, by_time);
  const auto hi = std::lower_bound(probes_.begin(), probes_.end(), to, by_time);
  return {lo, hi};
}

}  // namespace desired::telemetry
