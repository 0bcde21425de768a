#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace desired::dash {

struct Representation {
  std::uint16_t width;
  std::uint16_t height;
  double fps;
  int bitrate_kbps;
  int gop_frames;
  const char* codec;

  std::string resolution() const {
    return std::to_string(width) + "x" + std::to_string(height);
  }
};

struct AudioTrack {
  int bitrate_kbps;
  const char* codec;
};

// Served representations in ascending bitrate order.
inline constexpr std::array<Representation, 3> kVideoCatalog{{
    {426, 240, 18.0, 280, 72, "h264"},
    {854, 480, 24.0, 980, 96, "h264"},
    {1280, 720, 30.0, 2080, 120, "h264"},
}};

inline constexpr std::array<AudioTrack, 2> kAudioCatalog{{
    {128, "aac"},
    {64, "aac"},
}};

inline constexpr std::size_t kLowestRep = 0;
inline constexpr std::size_t kHighestRep = kVideoCatalog.size() - 1;

}  // namespace desired::dash
