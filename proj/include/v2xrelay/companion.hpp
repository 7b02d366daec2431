#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "v2xrelay/geo.hpp"
#include "v2xrelay/result.hpp"
#include "v2xrelay/wire.hpp"

namespace v2xrelay::companion {

struct IncidentZone {
  std::string id;
  geo::GeoPosition center;
  double radius_m = 30.0;  // > 0
  wire::IncidentType incident_type = wire::IncidentType::kAccident;
};

struct SystemCadence {
  int64_t min_interval_ms = 1000;
  int64_t max_interval_ms = 2000;
};

struct IngestStats {
  uint64_t accepted = 0;
  uint64_t stale_discarded = 0;
  uint64_t decode_errors = 0;
};

// Deterministic pseudo-image source: payload bytes come from a splitmix64
// stream keyed by (seed, frame_seq), with the sequence number embedded in
// the first 8 bytes so every frame is distinct and hash-checkable.
class FrameSource {
 public:
  FrameSource(uint64_t seed, size_t payload_bytes);
  wire::FramePacket next(int64_t now_ms);
  uint64_t frames_generated() const { return next_seq_ - 1; }

 private:
  uint64_t seed_;
  size_t payload_bytes_;
  uint64_t next_seq_ = 1;
};

// FIFO buffer for frames produced while the frame socket is down. Oldest
// frame is dropped once capacity is reached.
class FrameRing {
 public:
  explicit FrameRing(size_t capacity = 32) : capacity_(capacity) {}

  void push(wire::FramePacket f);
  std::vector<wire::FramePacket> drain();
  size_t size() const { return buf_.size(); }
  size_t capacity() const { return capacity_; }

 private:
  size_t capacity_;
  std::deque<wire::FramePacket> buf_;
};

struct PublishResult {
  enum class Status { kSent, kBuffered };
  Status status = Status::kBuffered;
  // Frames to hand to the socket, ring backlog first. Empty when buffered.
  std::vector<wire::FramePacket> to_send;
};

// The on-UAV pipeline state machine: OBU ingest, cadence-gated System
// Messages, latched incident checks, and frame publishing. Single logical
// event loop; callers serialize access (live mode funnels socket reads into
// one ordered stream).
class Companion {
 public:
  using UavPosSource = std::function<geo::GeoPosition(int64_t t_ms)>;

  explicit Companion(UavPosSource uav_pos_source, SystemCadence cadence = {});

  // Decode errors and stale/duplicate fixes are counted, never fatal.
  Result<void> ingest_obu_datagram(std::span<const uint8_t> datagram,
                                   int64_t recv_ts_ms);

  // Emits when at least min_interval has passed and a fresh fix arrived
  // since the last emission, or unconditionally at max_interval. Never-seen
  // CAV yields the null-position / age -1 sentinel message.
  std::optional<wire::SystemMessage> compose_system_message(int64_t now_ms);

  // First unlatched zone containing the latest CAV fix fires once per run.
  std::optional<wire::FaultMessage> check_incident(
      std::span<const IncidentZone> zones, int64_t now_ms);

  // Ring-buffered publish. `connected` reflects the frame socket state;
  // when connected the backlog flushes in FIFO order ahead of the new frame.
  PublishResult publish_frame(wire::FramePacket frame, bool connected);

  const IngestStats& stats() const { return stats_; }
  std::optional<wire::CavStateMessage> last_cav() const;
  std::optional<int64_t> last_cav_recv_ts() const;
  std::optional<int64_t> last_system_sent_ms() const {
    return last_system_sent_ms_;
  }
  const std::set<std::string>& incident_latches() const { return latches_; }
  size_t ring_size() const { return ring_.size(); }
  const SystemCadence& cadence() const { return cadence_; }

 private:
  UavPosSource uav_pos_source_;
  SystemCadence cadence_;
  std::optional<wire::CavStateMessage> last_cav_;
  int64_t last_cav_recv_ts_ms_ = 0;
  std::optional<int64_t> last_system_sent_ms_;
  std::set<std::string> latches_;
  IngestStats stats_;
  FrameRing ring_;
};

}  // namespace v2xrelay::companion
