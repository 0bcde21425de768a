#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "desired/sim/engine.hpp"
#include "desired/sim/host.hpp"
#include "desired/sim/packet.hpp"

namespace desired::transport {

using sim::PacketSink;
using sim::Time;

enum class CcState : std::uint8_t { kSlowStart, kCongestionAvoidance, kFastRecovery };
enum class CongestionKind : std::uint8_t { kTripleDup, kTimeout, kEcnEcho };

const char* to_string(CcState s);

struct TcpConfig {
  std::uint32_t segment_payload = 1460;
  std::uint32_t header_bytes = 40;
  double initial_cwnd = 10.0;
  double initial_ssthresh = 64.0;
  Time initial_rto = sim::seconds(1);
  Time min_rto = sim::milliseconds(200);
  Time max_rto = sim::seconds(60);
  bool ecn_capable = false;
};

class TcpModelError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct SentSegment {
  Time sent_at = 0;
  bool retransmitted = false;
};

// New Reno sender state. Segment numbers count from 0; snd_una is the first
// unacknowledged segment, snd_nxt the next one to transmit, snd_max one past
// the highest ever transmitted (snd_nxt drops below it after a timeout).
struct Connection {
  double cwnd = 10.0;
  double ssthresh = 64.0;
  CcState state = CcState::kSlowStart;
  Time srtt = 0;
  Time rttvar = 0;
  Time rto = sim::seconds(1);
  bool has_rtt_sample = false;
  int dup_acks = 0;
  bool ecn_capable = false;

  std::int64_t snd_una = 0;
  std::int64_t snd_nxt = 0;
  std::int64_t snd_max = 0;
  std::int64_t app_end = 0;   // segments the application has handed over
  std::int64_t recover = -1;  // highest segment outstanding at loss detection
  std::int64_t ecn_recover = 0;
  bool cwr_pending = false;
  std::map<std::int64_t, SentSegment> inflight;

  static Connection with_config(const TcpConfig& cfg);
  std::int64_t outstanding() const noexcept { return snd_nxt - snd_una; }
};

struct AckDescriptor {
  std::int64_t ack = 0;  // cumulative: next expected segment
  bool ece = false;
};

struct AckOutcome {
  std::int64_t newly_acked = 0;
  bool duplicate = false;
  std::optional<std::int64_t> retransmit;
  bool entered_recovery = false;
  bool ecn_reduced = false;
};

/// Applies one ACK, including New Reno dup-ACK counting, recovery entry and
/// exit, partial-ACK retransmission and the ECN-echo response. Throws
/// TcpModelError for an ACK beyond anything sent.
AckOutcome on_ack(Connection& conn, const AckDescriptor& ack);

/// Window reduction for a congestion signal. Returns false if an ECN echo was
/// ignored because a reduction already happened within the current RTT.
bool on_congestion(Connection& conn, CongestionKind kind);

/// floor(cwnd) minus outstanding segments, clamped at zero.
std::int64_t send_window(const Connection& conn);

/// RFC 6298 estimator update with one RTT sample.
void update_rtt(Connection& conn, Time sample, const TcpConfig& cfg);

// Sender half bound to the event engine: transmits segments through a
// PacketSink, runs the retransmission timer, and feeds ACKs into on_ack.
class TcpSender {
 public:
  using CwndObserver = std::function<void(const Connection&)>;

  TcpSender(sim::Simulator& sim, PacketSink& host, sim::FlowId flow, sim::NodeId peer,
            TcpConfig cfg);
  ~TcpSender();
  TcpSender(const TcpSender&) = delete;
  TcpSender& operator=(const TcpSender&) = delete;

  /// Hands \p segments more segments to the connection and transmits what the
  /// window allows.
  void add_data(std::int64_t segments);

  void on_ack_packet(const sim::Packet& ack);

  /// Stops timers; pending packets already on the wire are left to be dropped.
  void close();

  const Connection& connection() const noexcept { return conn_; }
  std::uint64_t retransmissions() const noexcept { return retransmissions_; }
  std::uint64_t timeouts() const noexcept { return timeouts_; }
  std::uint64_t segments_sent() const noexcept { return segments_sent_; }

  /// Invoked after every ACK is processed (for traces).
  void set_cwnd_observer(CwndObserver obs) { observer_ = std::move(obs); }

 private:
  void transmit(std::int64_t seg, bool retransmission);
  void fill_window();
  void arm_timer();
  void schedule_wakeup(Time at);
  void on_timer(std::uint64_t generation);

  sim::Simulator& sim_;
  PacketSink& host_;
  sim::FlowId flow_;
  sim::NodeId peer_;
  TcpConfig cfg_;
  Connection conn_;
  bool closed_ = false;
  Time rto_deadline_ = -1;
  bool timer_pending_ = false;
  Time timer_wake_ = 0;
  std::uint64_t timer_generation_ = 0;
  std::uint64_t retransmissions_ = 0;
  std::uint64_t timeouts_ = 0;
  std::uint64_t segments_sent_ = 0;
  CwndObserver observer_;
  std::shared_ptr<bool> alive_;
};

// Receiver half: cumulative ACK per arriving segment, CE echo until CWR.
class TcpReceiver {
 public:
  using ProgressCallback = std::function<void(std::int64_t rcv_nxt)>;

  TcpReceiver(PacketSink& host, sim::FlowId flow, sim::NodeId peer, TcpConfig cfg);

  void on_data_packet(const sim::Packet& data);
  void set_progress_callback(ProgressCallback cb) { progress_ = std::move(cb); }

  std::int64_t rcv_nxt() const noexcept { return rcv_nxt_; }
  std::uint64_t duplicate_segments() const noexcept { return duplicates_; }
  std::uint64_t delivered_segments() const noexcept { return static_cast<std::uint64_t>(rcv_nxt_); }
  std::uint64_t ce_received() const noexcept { return ce_received_; }

 private:
  PacketSink& host_;
  sim::FlowId flow_;
  sim::NodeId peer_;
  TcpConfig cfg_;
  std::int64_t rcv_nxt_ = 0;
  std::set<std::int64_t> out_of_order_;
  bool ece_pending_ = false;
  std::uint64_t duplicates_ = 0;
  std::uint64_t ce_received_ = 0;
  ProgressCallback progress_;
};

}  // namespace desired::transport
