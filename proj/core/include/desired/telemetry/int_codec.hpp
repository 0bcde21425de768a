#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace desired::telemetry {

// Per-hop INT metadata as collected by out-of-band probes. Each record packs
// into exactly 256 bits; fields are laid out most-significant-bit first in the
// declaration order below.
struct IntRecord {
  std::uint32_t switch_id = 0;          // 31 bits
  std::uint16_t ingress_port = 0;       // 9 bits
  std::uint16_t egress_port = 0;        // 9 bits
  std::uint16_t egress_spec = 0;        // 9 bits
  std::uint64_t ingress_global_ts = 0;  // 48 bits, us
  std::uint64_t egress_global_ts = 0;   // 48 bits, us
  std::uint32_t enq_timestamp = 0;      // 32 bits, us
  std::uint32_t enq_qdepth = 0;         // 19 bits, packets
  std::uint32_t deq_timedelta = 0;      // 32 bits, us
  std::uint32_t deq_qdepth = 0;         // 19 bits, packets

  bool operator==(const IntRecord&) const = default;
};

struct IntField {
  const char* name;
  unsigned bits;
};

inline constexpr std::array<IntField, 10> kIntLayout{{
    {"switch_id", 31},
    {"ingress_port", 9},
    {"egress_port", 9},
    {"egress_spec", 9},
    {"ingress_global_ts", 48},
    {"egress_global_ts", 48},
    {"enq_timestamp", 32},
    {"enq_qdepth", 19},
    {"deq_timedelta", 32},
    {"deq_qdepth", 19},
}};

inline constexpr std::size_t kIntRecordBytes = 32;
inline constexpr std::size_t kDefaultHopLimit = 8;

/// Field values of \p r in layout order.
std::array<std::uint64_t, kIntLayout.size()> field_values(const IntRecord& r);

class IntEncodingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IntFramingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Appends the 32-byte encoding of \p r to \p out. Throws IntEncodingError if
/// a field does not fit its width.
void append_record(std::vector<std::uint8_t>& out, const IntRecord& r);

/// Concatenated 32-byte records in hop order.
std::vector<std::uint8_t> encode_int(std::span<const IntRecord> records,
                                     std::size_t hop_limit = kDefaultHopLimit);

/// Throws IntFramingError unless the length is a positive multiple of 32.
std::vector<IntRecord> decode_int(std::span<const std::uint8_t> bytes);

}  // namespace desired::telemetry
