#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "desired/sim/network.hpp"
#include "desired/sim/rng.hpp"
#include "desired/sim/time.hpp"

namespace desired::aqm {

using sim::PortIndex;
using sim::Time;

enum class AqmMode : std::uint8_t { kFixed, kDynamic };

inline constexpr Time kMinDynamicTarget = sim::milliseconds(20);
inline constexpr Time kMaxDynamicTarget = sim::milliseconds(70);
inline constexpr double kDefaultMaxP = 0.1;

struct PortAqm {
  Time avg_delay = 0;  // EWMA of dequeue time delta
  bool drop_flag = false;
};

// AQM configuration of one switch plus per-output-port running state. The
// single target-delay knob sets both RED thresholds.
struct AqmState {
  Time target_delay = kMinDynamicTarget;
  double max_p = kDefaultMaxP;
  AqmMode mode = AqmMode::kFixed;
  std::vector<PortAqm> ports;

  Time min_th() const noexcept { return target_delay; }
  Time max_th() const noexcept { return 2 * target_delay; }

  static AqmState make(AqmMode mode, Time target, std::size_t port_count,
                       double max_p = kDefaultMaxP);
};

struct QueueSample {
  Time deq_timedelta = 0;
  std::uint32_t enq_qdepth = 0;
  std::uint32_t deq_qdepth = 0;
  PortIndex port = 0;
};

enum class Decision : std::uint8_t { kPass, kMark, kNotifyDrop };
enum class IngressVerdict : std::uint8_t { kForward, kDrop, kConsumed };

const char* to_string(Decision d);

struct PacketView {
  bool ect = false;
  bool notification = false;
};

struct EgressOutcome {
  Decision decision = Decision::kPass;
  double probability = 0.0;  // RED drop probability before coupling
};

/// S_t = (Y_t + S_{t-1}) >> 1, i.e. the EWMA with weight one half.
Time ewma_update(Time prev_avg, Time sample);

/// Linear RED ramp between min_th and max_th, 1 at and beyond max_th.
double red_probability(Time avg_delay, const AqmState& state);

/// Square-law coupling from drop probability to ECN mark probability.
double coupled_mark_probability(double drop_probability);

/// Egress decision for the packet leaving sample.port. Updates the port's
/// average; never drops the departing packet.
EgressOutcome egress_decide(const QueueSample& sample, AqmState& state, PacketView pkt,
                            sim::RngStream& rng);

/// Ingress action for a packet headed to \p port: notification clones set the
/// port's drop flag and are consumed; other packets are dropped once when the
/// flag is set.
IngressVerdict ingress_check(PacketView pkt, PortIndex port, AqmState& state);

class TargetDelayError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Throws TargetDelayError unless target is within the dynamic-mode range.
void validate_dynamic_target(Time target);

/// Sets the target on a state in dynamic mode. Throws for out-of-range values
/// and for fixed-mode states.
void set_target_delay(AqmState& state, Time target);

}  // namespace desired::aqm
