#include "desired/transport/tcp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace desired::transport {

const char* to_string(CcState s) {
  switch (s) {
    case CcState::kSlowStart: return "slow-start";
    case CcState::kCongestionAvoidance: return "congestion-avoidance";
    case CcState::kFastRecovery: return "fast-recovery";
  }
  return "?";
}

Connection Connection::with_config(const TcpConfig& cfg) {
  Connection c;
  c.cwnd = cfg.initial_cwnd;
  c.ssthresh = cfg.initial_ssthresh;
  c.rto = cfg.initial_rto;
  c.ecn_capable = cfg.ecn_capable;
  c.state = c.cwnd < c.ssthresh ? CcState::kSlowStart : CcState::kCongestionAvoidance;
  return c;
}

namespace {

void settle_growth_state(Connection& conn) {
  conn.state = conn.cwnd < conn.ssthresh ? CcState::kSlowStart : CcState::kCongestionAvoidance;
}

}  // namespace

bool on_congestion(Connection& conn, CongestionKind kind) {
  switch (kind) {
    case CongestionKind::kTripleDup:
      conn.ssthresh = std::max(conn.cwnd / 2.0, 2.0);
      conn.cwnd = conn.ssthresh + 3.0;
      conn.state = CcState::kFastRecovery;
      return true;
    case CongestionKind::kTimeout:
      conn.ssthresh = std::max(conn.cwnd / 2.0, 2.0);
      conn.cwnd = 1.0;
      conn.state = CcState::kSlowStart;
      conn.dup_acks = 0;
      conn.recover = conn.snd_max - 1;
      conn.snd_nxt = conn.snd_una;
      for (auto& [seg, info] : conn.inflight) info.retransmitted = true;
      return true;
    case CongestionKind::kEcnEcho:
      if (conn.snd_una < conn.ecn_recover) return false;
      conn.ssthresh = std::max(conn.cwnd / 2.0, 2.0);
      conn.cwnd = std::max(conn.cwnd / 2.0, 1.0);
      settle_growth_state(conn);
      conn.ecn_recover = conn.snd_max;
      conn.cwr_pending = true;
      return true;
  }
  return false;
}

AckOutcome on_ack(Connection& conn, const AckDescriptor& a) {
  if (a.ack > conn.snd_max) {
    throw TcpModelError("ACK " + std::to_string(a.ack) + " beyond highest sent segment " +
                        std::to_string(conn.snd_max - 1));
  }
  AckOutcome out;
  if (a.ack < conn.snd_una) return out;

  if (a.ack > conn.snd_una) {
    out.newly_acked = a.ack - conn.snd_una;
    conn.inflight.erase(conn.inflight.begin(), conn.inflight.lower_bound(a.ack));
    conn.snd_una = a.ack;
    if (conn.snd_nxt < conn.snd_una) conn.snd_nxt = conn.snd_una;
    conn.dup_acks = 0;
    if (conn.state == CcState::kFastRecovery) {
      if (a.ack > conn.recover) {
        conn.cwnd = conn.ssthresh;
        conn.state = CcState::kCongestionAvoidance;
      } else {
        // Partial ACK: retransmit the next hole and deflate by what was acked.
        out.retransmit = conn.snd_una;
        conn.cwnd = std::max(conn.cwnd - static_cast<double>(out.newly_acked) + 1.0, 1.0);
      }
    } else if (conn.cwnd < conn.ssthresh) {
      conn.cwnd += 1.0;
      settle_growth_state(conn);
    } else {
      conn.cwnd += 1.0 / conn.cwnd;
      conn.state = CcState::kCongestionAvoidance;
    }
  } else if (conn.outstanding() > 0) {
    out.duplicate = true;
    ++conn.dup_acks;
    if (conn.state == CcState::kFastRecovery) {
      conn.cwnd += 1.0;
    } else if (conn.dup_acks == 3 && a.ack > conn.recover) {
      on_congestion(conn, CongestionKind::kTripleDup);
      conn.recover = conn.snd_max - 1;
      out.retransmit = conn.snd_una;
      out.entered_recovery = true;
    }
  }

  if (a.ece && conn.ecn_capable && conn.state != CcState::kFastRecovery) {
    out.ecn_reduced = on_congestion(conn, CongestionKind::kEcnEcho);
  }
  return out;
}

std::int64_t send_window(const Connection& conn) {
  const auto w = static_cast<std::int64_t>(std::floor(conn.cwnd)) - conn.outstanding();
  return std::max<std::int64_t>(w, 0);
}

void update_rtt(Connection& conn, Time sample, const TcpConfig& cfg) {
  if (!conn.has_rtt_sample) {
    conn.srtt = sample;
    conn.rttvar = sample / 2;
    conn.has_rtt_sample = true;
  } else {
    const Time err = conn.srtt > sample ? conn.srtt - sample : sample - conn.srtt;
    conn.rttvar = (3 * conn.rttvar + err) / 4;
    conn.srtt = (7 * conn.srtt + sample) / 8;
  }
  const Time rto = conn.srtt + std::max<Time>(4 * conn.rttvar, 1);
  conn.rto = std::clamp(rto, cfg.min_rto, cfg.max_rto);
}

TcpSender::TcpSender(sim::Simulator& sim, PacketSink& host, sim::FlowId flow, sim::NodeId peer,
                     TcpConfig cfg)
    : sim_(sim),
      host_(host),
      flow_(flow),
      peer_(peer),
      cfg_(cfg),
      conn_(Connection::with_config(cfg)),
      alive_(std::make_shared<bool>(true)) {}

TcpSender::~TcpSender() { *alive_ = false; }

void TcpSender::add_data(std::int64_t segments) {
  if (closed_ || segments <= 0) return;
  conn_.app_end += segments;
  fill_window();
}

void TcpSender::close() {
  closed_ = true;
  rto_deadline_ = -1;
}

void TcpSender::transmit(std::int64_t seg, bool retransmission) {
  sim::Packet pkt;
  pkt.uid = sim_.allocate_uid();
  pkt.kind = sim::PacketKind::kData;
  pkt.src = host_.address();
  pkt.dst = peer_;
  pkt.flow = flow_;
  pkt.size_bytes = cfg_.segment_payload + cfg_.header_bytes;
  pkt.seq = seg;
  pkt.ect = conn_.ecn_capable;
  pkt.sent_at = sim_.now();
  if (conn_.cwr_pending) {
    pkt.cwr = true;
    conn_.cwr_pending = false;
  }
  auto& info = conn_.inflight[seg];
  info.sent_at = sim_.now();
  info.retransmitted = info.retransmitted || retransmission;
  ++segments_sent_;
  if (retransmission) ++retransmissions_;
  host_.send(std::move(pkt));
}

void TcpSender::fill_window() {
  if (closed_) return;
  while (send_window(conn_) > 0 && conn_.snd_nxt < conn_.app_end) {
    const std::int64_t seg = conn_.snd_nxt;
    transmit(seg, seg < conn_.snd_max);
    ++conn_.snd_nxt;
    conn_.snd_max = std::max(conn_.snd_max, conn_.snd_nxt);
  }
  if (conn_.outstanding() > 0 && rto_deadline_ < 0) arm_timer();
}

void TcpSender::arm_timer() {
  rto_deadline_ = sim_.now() + conn_.rto;
  if (timer_pending_ && timer_wake_ <= rto_deadline_) return;
  schedule_wakeup(rto_deadline_);
}

void TcpSender::schedule_wakeup(Time at) {
  timer_pending_ = true;
  timer_wake_ = at;
  const std::uint64_t generation = ++timer_generation_;
  std::weak_ptr<bool> alive = alive_;
  sim_.schedule(at, [this, alive, generation] {
    if (auto a = alive.lock(); a && *a) on_timer(generation);
  });
}

void TcpSender::on_timer(std::uint64_t generation) {
  if (generation != timer_generation_) return;
  timer_pending_ = false;
  if (closed_ || rto_deadline_ < 0) return;
  if (sim_.now() < rto_deadline_) {
    // Deadline moved forward since this wakeup was scheduled.
    schedule_wakeup(rto_deadline_);
    return;
  }
  rto_deadline_ = -1;
  if (conn_.outstanding() == 0 && conn_.snd_una >= conn_.app_end) return;
  ++timeouts_;
  on_congestion(conn_, CongestionKind::kTimeout);
  conn_.rto = std::min(conn_.rto * 2, cfg_.max_rto);
  fill_window();
  if (observer_) observer_(conn_);
}

void TcpSender::on_ack_packet(const sim::Packet& ack) {
  if (closed_) return;
  std::optional<Time> sample;
  if (ack.ack > conn_.snd_una) {
    auto it = conn_.inflight.find(ack.ack - 1);
    if (it != conn_.inflight.end() && !it->second.retransmitted) {
      sample = sim_.now() - it->second.sent_at;
    }
  }
  const AckOutcome out = on_ack(conn_, AckDescriptor{ack.ack, ack.ece});
  if (out.newly_acked > 0) {
    if (sample) update_rtt(conn_, *sample, cfg_);
    if (conn_.outstanding() > 0) {
      arm_timer();
    } else {
      rto_deadline_ = -1;
    }
  }
  if (out.retransmit) transmit(*out.retransmit, true);
  fill_window();
  if (observer_) observer_(conn_);
}

TcpReceiver::TcpReceiver(PacketSink& host, sim::FlowId flow, sim::NodeId peer, TcpConfig cfg)
    : host_(host), flow_(flow), peer_(peer), cfg_(cfg) {}

void TcpReceiver::on_data_packet(const sim::Packet& data) {
  if (data.cwr) ece_pending_ = false;
  if (data.ce) {
    ++ce_received_;
    ece_pending_ = true;
  }
  bool advanced = false;
  if (data.seq == rcv_nxt_) {
    ++rcv_nxt_;
    while (!out_of_order_.empty() && *out_of_order_.begin() == rcv_nxt_) {
      out_of_order_.erase(out_of_order_.begin());
      ++rcv_nxt_;
    }
    advanced = true;
  } else if (data.seq > rcv_nxt_) {
    if (!out_of_order_.insert(data.seq).second) ++duplicates_;
  } else {
    ++duplicates_;
  }

  sim::Packet ack;
  ack.kind = sim::PacketKind::kAck;
  ack.src = host_.address();
  ack.dst = peer_;
  ack.flow = flow_;
  ack.size_bytes = cfg_.header_bytes;
  ack.ack = rcv_nxt_;
  ack.ece = ece_pending_;
  ack.sent_at = data.sent_at;
  host_.send(std::move(ack));
  if (advanced && progress_) progress_(rcv_nxt_);
}

}  // namespace desired::transport
