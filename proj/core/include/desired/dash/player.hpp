#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "desired/dash/catalog.hpp"
#include "desired/sim/time.hpp"

namespace desired::dash {

using sim::Time;

enum class AbrMode : std::uint8_t { kThroughput, kBola };

struct AbrConfig {
  double safety_factor = 0.9;
  double throughput_weight = 0.5;
  double bola_switch_buffer_s = 10.0;
  // Buffer ladder standing in for BOLA: >= high picks the top representation,
  // >= mid the middle one, otherwise the lowest.
  double bola_high_buffer_s = 24.0;
  double bola_mid_buffer_s = 12.0;
};

struct PlayerConfig {
  double buffer_cap_s = 60.0;
  double segment_s = 4.0;
  double restart_threshold_s = 4.0;
  int audio_kbps = 128;
  AbrConfig abr;
};

struct MetricRow {
  std::int64_t t = 0;  // seconds since start of run
  double fps = 0.0;
  double lbo = 0.0;
  int rep = -1;  // index into kVideoCatalog, -1 before the first segment
  bool stalled = false;
};

struct BufferedSegment {
  std::size_t rep = 0;
  double remaining_s = 0.0;
};

struct PlayerState {
  double lbo = 0.0;
  std::size_t current_rep = kLowestRep;
  bool stalled = false;
  bool started = false;
  double throughput_est_kbps = 0.0;
  AbrMode abr_mode = AbrMode::kThroughput;
  std::deque<BufferedSegment> buffer;
  std::vector<MetricRow> metric_log;

  static PlayerState initial();
};

struct SegmentDescriptor {
  std::size_t rep = 0;
  std::int64_t bytes = 0;
  double media_s = 4.0;
};

/// Highest representation whose bitrate fits under safety * estimate; the
/// lowest one if none fits.
std::size_t throughput_choice(double throughput_kbps, const AbrConfig& cfg);
std::size_t bola_choice(double lbo_s, const AbrConfig& cfg);

/// DYNAMIC rule: THROUGHPUT until the buffer reaches the switch level, then
/// BOLA; back to THROUGHPUT when the buffer falls below it and BOLA would pick
/// lower than THROUGHPUT. Updates abr_mode.
std::size_t select_representation(PlayerState& player, const AbrConfig& cfg);

/// Segment payload for \p rep including the audio track.
std::int64_t segment_bytes(std::size_t rep, const PlayerConfig& cfg);

void on_segment_downloaded(PlayerState& player, const SegmentDescriptor& seg, Time download_time,
                           const PlayerConfig& cfg);

/// A new request fits: a full segment still fits under the cap.
bool wants_segment(const PlayerState& player, const PlayerConfig& cfg);

/// Advances playback by one second and appends the row for second \p t.
MetricRow tick_player(PlayerState& player, std::int64_t t, const PlayerConfig& cfg);

struct PlayerSummary {
  std::size_t seconds = 0;
  std::size_t stalled_seconds = 0;
  std::size_t played_seconds = 0;
  double rebuffering_rate_pct = 0.0;
  std::array<double, kVideoCatalog.size()> resolution_share_pct{};
  double mean_fps = 0.0;
  double mean_lbo = 0.0;
};

/// Throws std::invalid_argument for an empty log.
PlayerSummary summarize(std::span<const MetricRow> log);

}  // namespace desired::dash
