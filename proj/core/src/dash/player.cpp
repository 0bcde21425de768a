#include "desired/dash/player.hpp"

#include <algorithm>
#include <cmath>

namespace desired::dash {

PlayerState PlayerState::initial() {
  PlayerState p;
  p.throughput_est_kbps = kVideoCatalog[kLowestRep].bitrate_kbps;
  return p;
}

std::size_t throughput_choice(double throughput_kbps, const AbrConfig& cfg) {
  const double budget = cfg.safety_factor * throughput_kbps;
  std::size_t pick = kLowestRep;
  for (std::size_t i = 0; i < kVideoCatalog.size(); ++i) {
    if (kVideoCatalog[i].bitrate_kbps <= budget) pick = i;
  }
  return pick;
}

std::size_t bola_choice(double lbo_s, const AbrConfig& cfg) {
  if (lbo_s >= cfg.bola_high_buffer_s) return 2;
  if (lbo_s >= cfg.bola_mid_buffer_s) return 1;
  return 0;
}

std::size_t select_representation(PlayerState& player, const AbrConfig& cfg) {
  const std::size_t tput = throughput_choice(player.throughput_est_kbps, cfg);
  const std::size_t bola = bola_choice(player.lbo, cfg);
  if (player.abr_mode == AbrMode::kThroughput) {
    if (player.lbo >= cfg.bola_switch_buffer_s) player.abr_mode = AbrMode::kBola;
  } else if (player.lbo < cfg.bola_switch_buffer_s &&
             kVideoCatalog[bola].bitrate_kbps < kVideoCatalog[tput].bitrate_kbps) {
    player.abr_mode = AbrMode::kThroughput;
  }
  return player.abr_mode == AbrMode::kThroughput ? tput : bola;
}

std::int64_t segment_bytes(std::size_t rep, const PlayerConfig& cfg) {
  const double kbps = kVideoCatalog.at(rep).bitrate_kbps + cfg.audio_kbps;
  return static_cast<std::int64_t>(std::llround(kbps * 1000.0 / 8.0 * cfg.segment_s));
}

void on_segment_downloaded(PlayerState& player, const SegmentDescriptor& seg, Time download_time,
                           const PlayerConfig& cfg) {
  if (download_time > 0) {
    const double sample_kbps =
        static_cast<double>(seg.bytes) * 8.0 / 1000.0 / sim::to_seconds(download_time);
    const double w = cfg.abr.throughput_weight;
    player.throughput_est_kbps = w * sample_kbps + (1.0 - w) * player.throughput_est_kbps;
  }
  player.buffer.push_back(BufferedSegment{seg.rep, seg.media_s});
  player.lbo += seg.media_s;
  // Clamp at the buffer cap, discarding media from the tail.
  while (player.lbo > cfg.buffer_cap_s && !player.buffer.empty()) {
    const double excess = player.lbo - cfg.buffer_cap_s;
    auto& back = player.buffer.back();
    const double cut = std::min(excess, back.remaining_s);
    back.remaining_s -= cut;
    player.lbo -= cut;
    if (back.remaining_s <= 0.0) player.buffer.pop_back();
  }
  if (!player.started) {
    player.started = true;
    player.current_rep = player.buffer.front().rep;
  }
  if (player.stalled && player.lbo >= cfg.restart_threshold_s) player.stalled = false;
}

bool wants_segment(const PlayerState& player, const PlayerConfig& cfg) {
  return player.lbo + cfg.segment_s <= cfg.buffer_cap_s;
}

MetricRow tick_player(PlayerState& player, std::int64_t t, const PlayerConfig&) {
  MetricRow row;
  row.t = t;
  if (player.started && !player.stalled) {
    if (!player.buffer.empty()) player.current_rep = player.buffer.front().rep;
    double left = 1.0;
    while (left > 0.0 && !player.buffer.empty()) {
      auto& front = player.buffer.front();
      const double take = std::min(left, front.remaining_s);
      front.remaining_s -= take;
      left -= take;
      if (front.remaining_s <= 1e-12) player.buffer.pop_front();
    }
    player.lbo = std::max(0.0, player.lbo - 1.0);
    if (player.buffer.empty()) player.lbo = 0.0;
    if (player.lbo <= 0.0) player.stalled = true;
  }
  row.lbo = player.lbo;
  row.stalled = player.stalled;
  row.rep = player.started ? static_cast<int>(player.current_rep) : -1;
  row.fps = (player.started && !player.stalled) ? kVideoCatalog[player.current_rep].fps : 0.0;
  player.metric_log.push_back(row);
  return row;
}

PlayerSummary summarize(std::span<const MetricRow> log) {
  if (log.empty()) throw std::invalid_argument("summarize: empty player log");
  PlayerSummary s;
  std::array<std::size_t, kVideoCatalog.size()> per_rep{};
  double fps_sum = 0.0;
  double lbo_sum = 0.0;
  for (const auto& row : log) {
    ++s.seconds;
    fps_sum += row.fps;
    lbo_sum += row.lbo;
    if (row.stalled) {
      ++s.stalled_seconds;
    } else if (row.rep >= 0) {
      ++s.played_seconds;
      ++per_rep[static_cast<std::size_t>(row.rep)];
    }
  }
  const double n = static_cast<double>(s.seconds);
  s.rebuffering_rate_pct = 100.0 * static_cast<double>(s.stalled_seconds) / n;
  s.mean_fps = fps_sum / n;
  s.mean_lbo = lbo_sum / n;
  if (s.played_seconds > 0) {
    for (std::size_t i = 0; i < per_rep.size(); ++i) {
      s.resolution_share_pct[i] =
          100.0 * static_cast<double>(per_rep[i]) / static_cast<double>(s.played_seconds);
    }
  }
  return s;
}

}  // namespace desired::dash
