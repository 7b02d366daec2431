#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "v2xrelay/geo.hpp"
#include "v2xrelay/result.hpp"

namespace v2xrelay::wire {

// ---------------------------------------------------------------------------
// Record types
// ---------------------------------------------------------------------------

// Closed registry of incident codes. Unknown codes are a decode error.
enum class IncidentType : uint8_t {
  kAccident = 1,
  kDebris = 2,
  kStalledVehicle = 3,
};

std::string_view incident_type_name(IncidentType t);
std::optional<IncidentType> incident_type_from_name(std::string_view name);
std::optional<IncidentType> incident_type_from_code(uint8_t code);

// The six-field state payload broadcast by the ground vehicle over the air
// link. Receive time is not on the wire; each hop stamps it on arrival.
struct CavStateMessage {
  geo::GeoPosition pos;
  uint64_t tx_timestamp_ms = 0;
  uint64_t gps_time_ms = 0;
  double ground_speed_mps = 0.0;

  bool operator==(const CavStateMessage&) const = default;
};

// Periodic record carrying CAV and UAV positions to the CMP. cav_pos is
// nullable: before the first CAV fix arrives the companion sends
// cav_pos = null with the cav_age_ms = -1 sentinel.
struct SystemMessage {
  int64_t msg_timestamp_ms = 0;
  std::optional<geo::GeoPosition> cav_pos;
  geo::GeoPosition uav_pos;
  int64_t cav_age_ms = 0;

  bool operator==(const SystemMessage&) const = default;
};

// One-shot incident record triggered by geofence entry.
struct FaultMessage {
  geo::GeoPosition incident_pos;
  int64_t incident_time_ms = 0;
  IncidentType incident_type = IncidentType::kAccident;

  bool operator==(const FaultMessage&) const = default;
};

// Synthetic camera frame carried over the frame socket.
struct FramePacket {
  uint64_t frame_seq = 0;
  int64_t capture_ts_ms = 0;
  std::vector<uint8_t> payload;

  bool operator==(const FramePacket&) const = default;
};

// Session records that share the CMP stream with System/Fault messages.
struct HelloRecord {
  std::string client_id;
  bool operator==(const HelloRecord&) const = default;
};

struct AckRecord {
  uint64_t seq = 0;
  int64_t recv_ts_ms = 0;
  bool operator==(const AckRecord&) const = default;
};

struct AlertBody {
  uint64_t alert_seq = 0;
  FaultMessage fault;
  bool operator==(const AlertBody&) const = default;
};

using CmpRecord =
    std::variant<HelloRecord, SystemMessage, FaultMessage, AckRecord, AlertBody>;

std::string_view cmp_record_kind(const CmpRecord& r);

// ---------------------------------------------------------------------------
// CAV state frame: fixed 56-byte big-endian layout
//   magic 'V' '2' | version u8 = 1 | msg_type u8 = 1 |
//   lat f64 | lon f64 | alt f64 | tx_timestamp u64 | gps_time u64 |
//   ground_speed f64 | CRC-32 (IEEE, over all preceding bytes) u32
// ---------------------------------------------------------------------------

inline constexpr size_t kCavFrameSize = 56;
inline constexpr uint8_t kMagic0 = 0x56;  // 'V'
inline constexpr uint8_t kMagic1 = 0x32;  // '2'
inline constexpr uint8_t kWireVersion = 1;
inline constexpr uint8_t kCavStateMsgType = 1;

Result<std::vector<uint8_t>> encode_cav_state(const CavStateMessage& m);
Result<CavStateMessage> decode_cav_state(std::span<const uint8_t> b);

// ---------------------------------------------------------------------------
// CMP stream framing: 4-byte big-endian length prefix + UTF-8 JSON body with
// a "kind" field. Body is capped at 64 KiB.
// ---------------------------------------------------------------------------

inline constexpr size_t kMaxCmpBody = 65'536;

Result<std::vector<uint8_t>> encode_cmp_record(const SystemMessage& m);
Result<std::vector<uint8_t>> encode_cmp_record(const FaultMessage& m);
Result<std::vector<uint8_t>> encode_cmp_record(const CmpRecord& r);

// Incremental decode step over a byte buffer. kRecord sets `record` and
// `consumed`; kNeedMoreData consumes nothing; kError sets `error`, and
// `consumed` is the poisoned frame's length when the stream can resync
// past it (0 means the stream is unrecoverable, e.g. BodyTooLarge).
struct DecodeProgress {
  enum class Status { kRecord, kNeedMoreData, kError };
  Status status = Status::kNeedMoreData;
  std::optional<CmpRecord> record;
  size_t consumed = 0;
  std::optional<Error> error;
};

DecodeProgress decode_cmp_record(std::span<const uint8_t> buffer);

// Per-connection stateful wrapper: feed() buffers incoming bytes, next()
// pulls one record at a time and preserves the remainder.
class CmpStreamDecoder {
 public:
  void feed(std::span<const uint8_t> bytes);
  DecodeProgress next();
  size_t buffered() const { return buf_.size(); }

 private:
  std::vector<uint8_t> buf_;
};

// ---------------------------------------------------------------------------
// Frame packet wire format (binary WebSocket payload):
//   magic 'F' 'P' | version u8 = 1 | msg_type u8 = 2 | frame_seq u64 |
//   capture_ts u64 | payload_len u32 | payload | CRC-32 u32
// ---------------------------------------------------------------------------

inline constexpr size_t kMaxFramePayload = 1'048'576;
inline constexpr size_t kFramePacketHeader = 24;

Result<std::vector<uint8_t>> encode_frame_packet(const FramePacket& p);
Result<FramePacket> decode_frame_packet(std::span<const uint8_t> b);

}  // namespace v2xrelay::wire
