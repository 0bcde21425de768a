#include "desired/aqm/switch.hpp"

namespace desired::aqm {

Switch::Switch(sim::Simulator& sim, sim::NodeId id, std::string name, SwitchConfig cfg)
    : Node(sim, id, name),
      cfg_(cfg),
      aqm_(AqmState::make(cfg.mode, cfg.target_delay, 0, cfg.max_p)),
      rng_(sim.rng_stream("aqm/" + name)) {}

AqmState& Switch::state() {
  if (aqm_.ports.size() < port_count()) aqm_.ports.resize(port_count());
  return aqm_;
}

void Switch::receive(sim::Packet pkt, PortIndex in_port) {
  ++stats_.received;
  const PortIndex out = route(pkt.dst);
  if (cfg_.aqm_enabled) {
    const auto verdict = ingress_check(PacketView{pkt.ect, false}, out, state());
    if (verdict == IngressVerdict::kDrop) {
      ++stats_.flag_drops;
      return;
    }
  }
  if (!port(out).enqueue(std::move(pkt), sim().now(), in_port)) ++stats_.tail_drops;
}

void Switch::on_dequeue(PortIndex port_index, sim::QueuedPacket& qp, std::uint32_t depth_after) {
  const Time now = sim().now();
  const QueueSample sample{now - qp.enq_ts, qp.enq_qdepth, depth_after, port_index};
  sim::Packet& pkt = qp.packet;

  if (cfg_.aqm_enabled) {
    const EgressOutcome out = egress_decide(sample, state(), PacketView{pkt.ect, false}, rng_);
    if (out.decision == Decision::kMark) {
      pkt.ce = true;
      ++stats_.marks;
    } else if (out.decision == Decision::kNotifyDrop) {
      recirculate_notification(port_index);
    }
    if (trace_) {
      trace_(AqmTraceRow{now, cfg_.switch_id, port_index, aqm_.ports[port_index].avg_delay,
                         out.probability, out.decision, pkt.uid});
    }
  }

  if (pkt.kind == sim::PacketKind::kProbe) {
    if (pkt.telemetry.size() / telemetry::kIntRecordBytes >= cfg_.hop_limit) {
      ++stats_.hop_limit_refusals;
      return;
    }
    telemetry::IntRecord r;
    r.switch_id = cfg_.switch_id;
    r.ingress_port = qp.ingress_port;
    r.egress_port = port_index;
    r.egress_spec = port_index;
    r.ingress_global_ts = static_cast<std::uint64_t>(qp.ingress_ts);
    r.egress_global_ts = static_cast<std::uint64_t>(now);
    r.enq_timestamp = static_cast<std::uint32_t>(qp.enq_ts & 0xffffffff);
    r.enq_qdepth = std::min<std::uint32_t>(qp.enq_qdepth, (1u << 19) - 1);
    r.deq_timedelta = static_cast<std::uint32_t>(sample.deq_timedelta);
    r.deq_qdepth = std::min<std::uint32_t>(depth_after, (1u << 19) - 1);
    telemetry::append_record(pkt.telemetry, r);
    pkt.size_bytes += telemetry::kIntRecordBytes;
    ++stats_.int_appends;
  }
}

void Switch::recirculate_notification(PortIndex port_index) {
  ++stats_.notifications;
  sim().schedule_in(cfg_.recirculation_latency, [this, port_index] {
    ingress_check(PacketView{false, true}, port_index, state());
  });
}

void apply_target_delay(std::span<Switch* const> switches, Time new_target) {
  validate_dynamic_target(new_target);
  for (const Switch* sw : switches) {
    if (sw->config().mode != AqmMode::kDynamic) {
      throw std::logic_error("apply_target_delay: switch " + sw->name() + " is in fixed mode");
    }
  }
  for (Switch* sw : switches) sw->set_target(new_target);
}

}  // namespace desired::aqm
