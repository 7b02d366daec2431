#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "v2xrelay/geo.hpp"
#include "v2xrelay/result.hpp"
#include "v2xrelay/wire.hpp"

namespace v2xrelay::airlink {

// Lossy-link model: flat drop floor out to d0_m, linear ramp to certain loss
// at dmax_m; delivery latency = base + latency_per_m * distance + uniform
// jitter. latency_per_m_ms is the distance coupling used by the dynamic
// experiment presets and is 0 by default.
struct ChannelParams {
  double base_latency_ms = 30.0;
  double jitter_ms = 0.0;
  double p_base = 0.0;
  double d0_m = 300.0;
  double dmax_m = 600.0;
  double latency_per_m_ms = 0.0;
  uint64_t seed = 0;

  bool operator==(const ChannelParams&) const = default;
};

Result<void> validate(const ChannelParams& p);

enum class Verdict : uint8_t { kDelivered, kDropped };

struct DeliveryOutcome {
  Verdict verdict = Verdict::kDropped;
  int64_t arrival_ts_ms = 0;  // meaningful iff delivered

  bool delivered() const { return verdict == Verdict::kDelivered; }
};

double drop_probability(double d_m, const ChannelParams& p);

// One simulated link instance. Owns its RNG stream; exactly two variates are
// consumed per transmit regardless of outcome, so the stream position never
// depends on delivery verdicts. transmit calls must come in nondecreasing
// send_ts order; violations throw std::logic_error.
class Channel {
 public:
  explicit Channel(const ChannelParams& p);

  DeliveryOutcome transmit(double distance_m, int64_t send_ts_ms);

  const ChannelParams& params() const { return params_; }

 private:
  double next_unit();

  ChannelParams params_;
  std::mt19937_64 rng_;
  int64_t last_send_ts_ms_ = std::numeric_limits<int64_t>::min();
};

// Broadcast-facing wrapper: range is the 3-D slant distance between the two
// radios. The payload itself does not influence the channel.
DeliveryOutcome transmit(Channel& ch, const wire::CavStateMessage& m,
                         const geo::GeoPosition& tx, const geo::GeoPosition& rx,
                         int64_t send_ts_ms);

}  // namespace v2xrelay::airlink
