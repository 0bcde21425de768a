#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>

#include "desired/dash/player.hpp"
#include "desired/sim/engine.hpp"
#include "desired/sim/host.hpp"
#include "desired/transport/tcp.hpp"

namespace desired::dash {

struct ClientConfig {
  PlayerConfig player;
  transport::TcpConfig tcp;
  std::uint32_t request_bytes = 120;
  Time request_retry = sim::seconds(1);
  bool record_metrics = true;
};

// Origin server. One TCP sender per client flow, created on the first
// request; requests carry their index in seq and the segment count in ack.
class DashServer {
 public:
  DashServer(sim::Simulator& sim, sim::Host& host, transport::TcpConfig tcp);

  /// Tears down the session for \p flow (client stopped).
  void close(sim::FlowId flow);

  std::size_t sessions() const noexcept { return sessions_.size(); }
  std::uint64_t requests_served() const noexcept { return served_; }
  std::uint64_t duplicate_requests() const noexcept { return duplicates_; }

 private:
  struct Session {
    std::unique_ptr<transport::TcpSender> sender;
    std::int64_t last_request = -1;
  };

  void on_request(const sim::Packet& req);

  sim::Simulator& sim_;
  sim::Host& host_;
  transport::TcpConfig tcp_;
  std::map<sim::FlowId, Session> sessions_;
  std::set<sim::FlowId> closed_;
  std::uint64_t served_ = 0;
  std::uint64_t duplicates_ = 0;
};

// Video player bound to one flow. Downloads segments sequentially over a
// single connection and ticks playback once per second.
class DashClient {
 public:
  DashClient(sim::Simulator& sim, sim::Host& host, sim::NodeId server, sim::FlowId flow,
             ClientConfig cfg);
  ~DashClient();
  DashClient(const DashClient&) = delete;
  DashClient& operator=(const DashClient&) = delete;

  /// Issues the first request now and ticks at now()+1 s, now()+2 s, ...
  /// through \p last_tick inclusive.
  void start(Time last_tick);
  void stop();

  const PlayerState& player() const noexcept { return player_; }
  sim::FlowId flow() const noexcept { return flow_; }
  std::uint64_t segments_downloaded() const noexcept { return downloaded_; }
  std::uint64_t request_retries() const noexcept { return retries_; }

  /// Called after each playback tick with the row just logged.
  using TickObserver = std::function<void(const MetricRow&)>;
  void set_tick_observer(TickObserver obs) { on_tick_ = std::move(obs); }

 private:
  void maybe_request();
  void send_request();
  void on_progress(std::int64_t rcv_nxt);
  void on_tick(std::int64_t t);
  void on_retry(std::int64_t request_index, std::int64_t rcv_at_send);

  sim::Simulator& sim_;
  sim::Host& host_;
  sim::NodeId server_;
  sim::FlowId flow_;
  ClientConfig cfg_;
  transport::TcpReceiver receiver_;
  PlayerState player_;

  bool running_ = false;
  bool outstanding_ = false;
  std::int64_t request_index_ = -1;
  std::int64_t request_end_ = 0;  // cumulative TCP segment count once done
  std::int64_t request_segments_ = 0;
  SegmentDescriptor pending_;
  Time request_time_ = 0;
  Time start_time_ = 0;
  Time last_tick_ = 0;
  std::uint64_t downloaded_ = 0;
  std::uint64_t retries_ = 0;
  TickObserver on_tick_;
  std::shared_ptr<bool> alive_;
};

/// TCP segments needed for \p bytes of payload.
std::int64_t tcp_segments_for(std::int64_t bytes, const transport::TcpConfig& tcp);

}  // namespace desired::dash
