#include "v2xrelay/airlink.hpp"

#include <cmath>
#include <stdexcept>

namespace v2xrelay::airlink {

Result<void> validate(const ChannelParams& p) {
  if (!(p.base_latency_ms >= 0.0) || !std::isfinite(p.base_latency_ms)) {
    return make_error(Errc::kConfigError, "base_latency_ms");
  }
  if (!(p.jitter_ms >= 0.0) || !std::isfinite(p.jitter_ms)) {
    return make_error(Errc::kConfigError, "jitter_ms");
  }
  if (!(p.p_base >= 0.0 && p.p_base <= 1.0)) {
    return make_error(Errc::kConfigError, "p_base");
  }
  if (!(p.d0_m >= 0.0) || !(p.dmax_m >= p.d0_m)) {
    return make_error(Errc::kConfigError, "d0_m/dmax_m");
  }
  if (!(p.latency_per_m_ms >= 0.0) || !std::isfinite(p.latency_per_m_ms)) {
    return make_error(Errc::kConfigError, "latency_per_m_ms");
  }
  return {};
}

double drop_probability(double d_m, const ChannelParams& p) {
  if (d_m >= p.dmax_m) {
    return 1.0;
  }
  if (d_m <= p.d0_m) {
    return p.p_base;
  }
  const double frac = (d_m - p.d0_m) / (p.dmax_m - p.d0_m);
  return p.p_base + frac * (1.0 - p.p_base);
}

Channel::Channel(const ChannelParams& p) : params_(p), rng_(p.seed) {
  if (auto v = validate(p); !v) {
    throw std::logic_error("airlink: invalid channel params: " +
                           v.error().to_string());
  }
}

double Channel::next_unit() {
  // 53-bit uniform in [0,1); avoids std::uniform_real_distribution so the
  // draw sequence is pinned by this code, not the standard library.
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

DeliveryOutcome Channel::transmit(double distance_m, int64_t send_ts_ms) {
  if (send_ts_ms < last_send_ts_ms_) {
    throw std::logic_error("airlink: transmit send_ts regression");
  }
  last_send_ts_ms_ = send_ts_ms;

  const double u_drop = next_unit();
  const double u_jitter = next_unit();

  if (u_drop < drop_probability(distance_m, params_)) {
    return DeliveryOutcome{Verdict::kDropped, 0};
  }
  const double jitter = params_.jitter_ms * (2.0 * u_jitter - 1.0);
  const double latency_ms = params_.base_latency_ms +
                            params_.latency_per_m_ms * distance_m + jitter;
  int64_t arrival = send_ts_ms + static_cast<int64_t>(std::llround(latency_ms));
  if (arrival <= send_ts_ms) {
    arrival = send_ts_ms + 1;
  }
  return DeliveryOutcome{Verdict::kDelivered, arrival};
}

DeliveryOutcome transmit(Channel& ch, const wire::CavStateMessage& /*m*/,
                         const geo::GeoPosition& tx, const geo::GeoPosition& rx,
                         int64_t send_ts_ms) {
  return ch.transmit(geo::slant_distance_m(tx, rx), send_ts_ms);
}

}  // namespace v2xrelay::airlink
