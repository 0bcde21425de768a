#include "desired/telemetry/int_codec.hpp"

#include <string>

namespace desired::telemetry {

namespace {

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out), base_(out.size()) {
    out_.resize(base_ + kIntRecordBytes, 0);
  }

  void put(std::uint64_t value, unsigned bits) {
    for (unsigned i = bits; i-- > 0;) {
      if ((value >> i) & 1u) {
        out_[base_ + pos_ / 8] |= static_cast<std::uint8_t>(0x80u >> (pos_ % 8));
      }
      ++pos_;
    }
  }

 private:
  std::vector<std::uint8_t>& out_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t get(unsigned bits) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < bits; ++i) {
      const unsigned bit = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
      v = (v << 1) | bit;
      ++pos_;
    }
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::array<std::uint64_t, kIntLayout.size()> field_values(const IntRecord& r) {
  return {r.switch_id,        r.ingress_port,     r.egress_port,   r.egress_spec,
          r.ingress_global_ts, r.egress_global_ts, r.enq_timestamp, r.enq_qdepth,
          r.deq_timedelta,    r.deq_qdepth};
}

void append_record(std::vector<std::uint8_t>& out, const IntRecord& r) {
  const auto values = field_values(r);
  for (std::size_t i = 0; i < kIntLayout.size(); ++i) {
    const unsigned bits = kIntLayout[i].bits;
    if (bits < 64 && (values[i] >> bits) != 0) {
      throw IntEncodingError(std::string("INT field ") + kIntLayout[i].name + " value " +
                             std::to_string(values[i]) + " exceeds " + std::to_string(bits) +
                             " bits");
    }
  }
  BitWriter w(out);
  for (std::size_t i = 0; i < kIntLayout.size(); ++i) w.put(values[i], kIntLayout[i].bits);
}

std::vector<std::uint8_t> encode_int(std::span<const IntRecord> records, std::size_t hop_limit) {
  if (records.size() > hop_limit) {
    throw IntEncodingError("INT stack of " + std::to_string(records.size()) +
                           " records exceeds hop limit " + std::to_string(hop_limit));
  }
  std::vector<std::uint8_t> out;
  out.reserve(records.size() * kIntRecordBytes);
  for (const auto& r : records) append_record(out, r);
  return out;
}

std::vector<IntRecord> decode_int(std::span<const std::uint8_t> bytes) {
  if (bytes.empty() || bytes.size() % kIntRecordBytes != 0) {
    throw IntFramingError("INT stack length " + std::to_string(bytes.size()) +
                          " is not a positive multiple of 32");
  }
  std::vector<IntRecord> records;
  records.reserve(bytes.size() / kIntRecordBytes);
  for (std::size_t off = 0; off < bytes.size(); off += kIntRecordBytes) {
    BitReader rd(bytes.subspan(off, kIntRecordBytes));
    IntRecord r;
    r.switch_id = static_cast<std::uint32_t>(rd.get(31));
    r.ingress_port = static_cast<std::uint16_t>(rd.get(9));
    r.egress_port = static_cast<std::uint16_t>(rd.get(9));
    r.egress_spec = static_cast<std::uint16_t>(rd.get(9));
    r.ingress_global_ts = rd.get(48);
    r.egress_global_ts = rd.get(48);
    r.enq_timestamp = static_cast<std::uint32_t>(rd.get(32));
    r.enq_qdepth = static_cast<std::uint32_t>(rd.get(19));
    r.deq_timedelta = static_cast<std::uint32_t>(rd.get(32));
    r.deq_qdepth = static_cast<std::uint32_t>(rd.get(19));
    records.push_back(r);
  }
  return records;
}

}  // namespace desired::telemetry
