#include "desired/dash/client.hpp"

namespace desired::dash {

std::int64_t tcp_segments_for(std::int64_t bytes, const transport::TcpConfig& tcp) {
  const std::int64_t mss = tcp.segment_payload;
  return bytes <= 0 ? 0 : (bytes + mss - 1) / mss;
}

DashServer::DashServer(sim::Simulator& sim, sim::Host& host, transport::TcpConfig tcp)
    : sim_(sim), host_(host), tcp_(tcp) {
  host_.set_kind_handler(sim::PacketKind::kRequest,
                         [this](const sim::Packet& p) { on_request(p); });
}

void DashServer::on_request(const sim::Packet& req) {
  if (closed_.count(req.flow) != 0) return;
  auto it = sessions_.find(req.flow);
  if (it == sessions_.end()) {
    Session s;
    s.sender = std::make_unique<transport::TcpSender>(sim_, host_, req.flow, req.src, tcp_);
    it = sessions_.emplace(req.flow, std::move(s)).first;
    auto* sender = it->second.sender.get();
    host_.bind_flow(req.flow, [sender](const sim::Packet& ack) { sender->on_ack_packet(ack); });
  }
  Session& s = it->second;
  if (req.seq <= s.last_request) {
    ++duplicates_;
    return;
  }
  s.last_request = req.seq;
  ++served_;
  s.sender->add_data(req.ack);
}

void DashServer::close(sim::FlowId flow) {
  closed_.insert(flow);
  auto it = sessions_.find(flow);
  if (it == sessions_.end()) return;
  it->second.sender->close();
  host_.unbind_flow(flow);
  sessions_.erase(it);
}

DashClient::DashClient(sim::Simulator& sim, sim::Host& host, sim::NodeId server,
                       sim::FlowId flow, ClientConfig cfg)
    : sim_(sim),
      host_(host),
      server_(server),
      flow_(flow),
      cfg_(cfg),
      receiver_(host, flow, server, cfg.tcp),
      player_(PlayerState::initial()),
      alive_(std::make_shared<bool>(true)) {
  receiver_.set_progress_callback([this](std::int64_t n) { on_progress(n); });
}

DashClient::~DashClient() {
  *alive_ = false;
  if (running_) host_.unbind_flow(flow_);
}

void DashClient::start(Time last_tick) {
  running_ = true;
  start_time_ = sim_.now();
  last_tick_ = last_tick;
  host_.bind_flow(flow_, [this](const sim::Packet& p) { receiver_.on_data_packet(p); });
  maybe_request();
  const Time first = start_time_ + sim::kSecond;
  if (first <= last_tick_) {
    std::weak_ptr<bool> alive = alive_;
    sim_.schedule(first, [this, alive] {
      if (auto a = alive.lock(); a && *a) on_tick(1);
    });
  }
}

void DashClient::stop() {
  if (!running_) return;
  running_ = false;
  host_.unbind_flow(flow_);
}

void DashClient::maybe_request() {
  if (!running_ || outstanding_ || !wants_segment(player_, cfg_.player)) return;
  const std::size_t rep = select_representation(player_, cfg_.player.abr);
  pending_ = SegmentDescriptor{rep, segment_bytes(rep, cfg_.player), cfg_.player.segment_s};
  request_segments_ = tcp_segments_for(pending_.bytes, cfg_.tcp);
  request_end_ = receiver_.rcv_nxt() + request_segments_;
  ++request_index_;
  outstanding_ = true;
  request_time_ = sim_.now();
  send_request();
}

void DashClient::send_request() {
  sim::Packet req;
  req.kind = sim::PacketKind::kRequest;
  req.dst = server_;
  req.flow = flow_;
  req.size_bytes = cfg_.request_bytes;
  req.seq = request_index_;
  req.ack = request_segments_;
  req.sent_at = sim_.now();
  host_.send(std::move(req));

  std::weak_ptr<bool> alive = alive_;
  const std::int64_t index = request_index_;
  const std::int64_t rcv = receiver_.rcv_nxt();
  sim_.schedule_in(cfg_.request_retry, [this, alive, index, rcv] {
    if (auto a = alive.lock(); a && *a) on_retry(index, rcv);
  });
}

void DashClient::on_retry(std::int64_t request_index, std::int64_t rcv_at_send) {
  if (!running_ || !outstanding_ || request_index != request_index_) return;
  if (receiver_.rcv_nxt() != rcv_at_send) return;  // data is flowing
  ++retries_;
  send_request();
}

void DashClient::on_progress(std::int64_t rcv_nxt) {
  if (!running_ || !outstanding_ || rcv_nxt < request_end_) return;
  outstanding_ = false;
  ++downloaded_;
  on_segment_downloaded(player_, pending_, sim_.now() - request_time_, cfg_.player);
  maybe_request();
}

void DashClient::on_tick(std::int64_t t) {
  if (!running_) return;
  const MetricRow row = tick_player(player_, t, cfg_.player);
  if (!cfg_.record_metrics) player_.metric_log.clear();
  if (on_tick_) on_tick_(row);
  maybe_request();
  const Time next = start_time_ + (t + 1) * sim::kSecond;
  if (next <= last_tick_) {
    std::weak_ptr<bool> alive = alive_;
    sim_.schedule(next, [this, alive, t] {
      if (auto a = alive.lock(); a && *a) on_tick(t + 1);
    });
  }
}

}  // namespace desired::dash
