#include "v2xrelay/wire.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>

#include "json.hpp"

namespace v2xrelay::wire {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void put_u32be(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_u64be(std::vector<uint8_t>& out, uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>(v >> shift));
  }
}

void put_f64be(std::vector<uint8_t>& out, double v) {
  put_u64be(out, std::bit_cast<uint64_t>(v));
}

uint32_t get_u32be(const uint8_t* p) {
  return (static_cast<uint32_t>(p[0]) << 24) |
         (static_cast<uint32_t>(p[1]) << 16) |
         (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

uint64_t get_u64be(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v = (v << 8) | p[i];
  }
  return v;
}

double get_f64be(const uint8_t* p) {
  return std::bit_cast<double>(get_u64be(p));
}

uint32_t crc32_ieee(std::span<const uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  return static_cast<uint32_t>(
      ::crc32(crc, bytes.data(), static_cast<uInt>(bytes.size())));
}

Result<void> validate_cav_state(const CavStateMessage& m) {
  if (m.tx_timestamp_ms == 0) {
    return make_error(Errc::kInvalidMessage, "tx_timestamp_ms");
  }
  if (m.gps_time_ms == 0) {
    return make_error(Errc::kInvalidMessage, "gps_time_ms");
  }
  if (!(m.ground_speed_mps >= 0.0) || !std::isfinite(m.ground_speed_mps)) {
    return make_error(Errc::kInvalidMessage, "ground_speed_mps");
  }
  return {};
}

// SystemMessage either carries a CAV fix with its age, or the no-fix-yet
// sentinel (null position, age -1).
Result<void> validate_system(const SystemMessage& m) {
  if (m.msg_timestamp_ms < 0) {
    return make_error(Errc::kInvalidMessage, "msg_timestamp_ms");
  }
  if (m.cav_pos.has_value()) {
    if (m.cav_age_ms < 0) {
      return make_error(Errc::kInvalidMessage, "cav_age_ms");
    }
  } else if (m.cav_age_ms != -1) {
    return make_error(Errc::kInvalidMessage, "cav_age_ms sentinel");
  }
  return {};
}

Result<void> validate_fault(const FaultMessage& m) {
  if (m.incident_time_ms < 0) {
    return make_error(Errc::kInvalidMessage, "incident_time_ms");
  }
  if (!incident_type_from_code(static_cast<uint8_t>(m.incident_type))) {
    return make_error(Errc::kInvalidMessage, "incident_type");
  }
  return {};
}

ordered_json pos_to_json(const geo::GeoPosition& p) {
  return ordered_json{
      {"lat_deg", p.lat_deg()}, {"lon_deg", p.lon_deg()}, {"alt_m", p.alt_m()}};
}

ordered_json body_json(const SystemMessage& m) {
  ordered_json j;
  j["kind"] = "system";
  j["msg_timestamp_ms"] = m.msg_timestamp_ms;
  if (m.cav_pos.has_value()) {
    j["cav_pos"] = pos_to_json(*m.cav_pos);
  } else {
    j["cav_pos"] = nullptr;
  }
  j["uav_pos"] = pos_to_json(m.uav_pos);
  j["x_cav_age_ms"] = m.cav_age_ms;
  return j;
}

ordered_json fault_fields(const FaultMessage& m) {
  ordered_json j;
  j["incident_pos"] = pos_to_json(m.incident_pos);
  j["incident_time_ms"] = m.incident_time_ms;
  j["incident_type"] = std::string(incident_type_name(m.incident_type));
  return j;
}

ordered_json body_json(const FaultMessage& m) {
  ordered_json j;
  j["kind"] = "fault";
  ordered_json f = fault_fields(m);
  for (auto& [k, v] : f.items()) {
    j[k] = v;
  }
  return j;
}

Result<std::vector<uint8_t>> frame_body(const ordered_json& body) {
  const std::string text = body.dump();
  if (text.size() > kMaxCmpBody) {
    return make_error(Errc::kInvalidMessage, "body exceeds cap");
  }
  std::vector<uint8_t> out;
  out.reserve(4 + text.size());
  put_u32be(out, static_cast<uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  return out;
}

// --- strict JSON field extraction -----------------------------------------

std::optional<std::string> unknown_key(const json& obj,
                                       std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool found = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        found = true;
        break;
      }
    }
    if (!found) return it.key();
  }
  return std::nullopt;
}

Error field_error(const std::string& ctx, const std::string& key) {
  return make_error(Errc::kMalformedBody, ctx.empty() ? key : ctx + "." + key);
}

Result<int64_t> get_int(const json& o, const char* key, const std::string& ctx) {
  auto it = o.find(key);
  if (it == o.end() || !it->is_number_integer()) return field_error(ctx, key);
  return it->get<int64_t>();
}

Result<uint64_t> get_uint(const json& o, const char* key, const std::string& ctx) {
  auto it = o.find(key);
  if (it == o.end() || !it->is_number_integer() ||
      (it->is_number_integer() && it->get<int64_t>() < 0 && !it->is_number_unsigned())) {
    return field_error(ctx, key);
  }
  return it->get<uint64_t>();
}

Result<double> get_num(const json& o, const char* key, const std::string& ctx) {
  auto it = o.find(key);
  if (it == o.end() || !it->is_number()) return field_error(ctx, key);
  return it->get<double>();
}

Result<std::string> get_str(const json& o, const char* key, const std::string& ctx) {
  auto it = o.find(key);
  if (it == o.end() || !it->is_string()) return field_error(ctx, key);
  return it->get<std::string>();
}

Result<geo::GeoPosition> pos_from_json(const json& o, const std::string& ctx) {
  if (!o.is_object()) return make_error(Errc::kMalformedBody, ctx);
  if (auto bad = unknown_key(o, {"lat_deg", "lon_deg", "alt_m"})) {
    return field_error(ctx, *bad);
  }
  auto lat = get_num(o, "lat_deg", ctx);
  if (!lat) return lat.error();
  auto lon = get_num(o, "lon_deg", ctx);
  if (!lon) return lon.error();
  auto alt = get_num(o, "alt_m", ctx);
  if (!alt) return alt.error();
  auto pos = geo::GeoPosition::make(lat.value(), lon.value(), alt.value());
  if (!pos) return make_error(Errc::kMalformedBody, ctx + "." + pos.error().detail);
  return pos.value();
}

Result<CmpRecord> parse_system(const json& o) {
  if (auto bad = unknown_key(
          o, {"kind", "msg_timestamp_ms", "cav_pos", "uav_pos", "x_cav_age_ms"})) {
    return field_error("system", *bad);
  }
  auto ts = get_int(o, "msg_timestamp_ms", "system");
  if (!ts) return ts.error();
  auto age = get_int(o, "x_cav_age_ms", "system");
  if (!age) return age.error();
  auto uav_it = o.find("uav_pos");
  if (uav_it == o.end()) return field_error("system", "uav_pos");
  auto uav = pos_from_json(*uav_it, "system.uav_pos");
  if (!uav) return uav.error();

  std::optional<geo::GeoPosition> cav;
  auto cav_it = o.find("cav_pos");
  if (cav_it == o.end()) return field_error("system", "cav_pos");
  if (!cav_it->is_null()) {
    auto p = pos_from_json(*cav_it, "system.cav_pos");
    if (!p) return p.error();
    cav = p.value();
  }
  SystemMessage m{ts.value(), cav, uav.value(), age.value()};
  if (auto v = validate_system(m); !v) {
    return make_error(Errc::kMalformedBody, v.error().detail);
  }
  return CmpRecord(m);
}

Result<FaultMessage> parse_fault_fields(const json& o, const std::string& ctx,
                                        bool with_kind) {
  if (with_kind) {
    if (auto bad = unknown_key(
            o, {"kind", "incident_pos", "incident_time_ms", "incident_type"})) {
      return field_error(ctx, *bad);
    }
  } else {
    if (auto bad =
            unknown_key(o, {"incident_pos", "incident_time_ms", "incident_type"})) {
      return field_error(ctx, *bad);
    }
  }
  auto pos_it = o.find("incident_pos");
  if (pos_it == o.end()) return field_error(ctx, "incident_pos");
  auto pos = pos_from_json(*pos_it, ctx + ".incident_pos");
  if (!pos) return pos.error();
  auto ts = get_int(o, "incident_time_ms", ctx);
  if (!ts) return ts.error();
  auto name = get_str(o, "incident_type", ctx);
  if (!name) return name.error();
  auto type = incident_type_from_name(name.value());
  if (!type) return field_error(ctx, "incident_type");
  FaultMessage m{pos.value(), ts.value(), *type};
  if (auto v = validate_fault(m); !v) {
    return make_error(Errc::kMalformedBody, v.error().detail);
  }
  return m;
}

Result<CmpRecord> parse_hello(const json& o) {
  if (auto bad = unknown_key(o, {"kind", "client_id"})) {
    return field_error("hello", *bad);
  }
  auto id = get_str(o, "client_id", "hello");
  if (!id) return id.error();
  if (id.value().empty()) return field_error("hello", "client_id");
  return CmpRecord(HelloRecord{id.value()});
}

Result<CmpRecord> parse_ack(const json& o) {
  if (auto bad = unknown_key(o, {"kind", "seq", "recv_ts_ms"})) {
    return field_error("ack", *bad);
  }
  auto seq = get_uint(o, "seq", "ack");
  if (!seq) return seq.error();
  auto ts = get_int(o, "recv_ts_ms", "ack");
  if (!ts) return ts.error();
  return CmpRecord(AckRecord{seq.value(), ts.value()});
}

Result<CmpRecord> parse_alert(const json& o) {
  if (auto bad = unknown_key(o, {"kind", "alert_seq", "fault"})) {
    return field_error("alert", *bad);
  }
  auto seq = get_uint(o, "alert_seq", "alert");
  if (!seq) return seq.error();
  auto fault_it = o.find("fault");
  if (fault_it == o.end() || !fault_it->is_object()) {
    return field_error("alert", "fault");
  }
  auto fault = parse_fault_fields(*fault_it, "alert.fault", false);
  if (!fault) return fault.error();
  return CmpRecord(AlertBody{seq.value(), fault.value()});
}

}  // namespace

// ---------------------------------------------------------------------------
// Incident registry
// ---------------------------------------------------------------------------

std::string_view incident_type_name(IncidentType t) {
  switch (t) {
    case IncidentType::kAccident: return "accident";
    case IncidentType::kDebris: return "debris";
    case IncidentType::kStalledVehicle: return "stalled_vehicle";
  }
  return "unknown";
}

std::optional<IncidentType> incident_type_from_name(std::string_view name) {
  if (name == "accident") return IncidentType::kAccident;
  if (name == "debris") return IncidentType::kDebris;
  if (name == "stalled_vehicle") return IncidentType::kStalledVehicle;
  return std::nullopt;
}

std::optional<IncidentType> incident_type_from_code(uint8_t code) {
  switch (code) {
    case 1: return IncidentType::kAccident;
    case 2: return IncidentType::kDebris;
    case 3: return IncidentType::kStalledVehicle;
    default: return std::nullopt;
  }
}

std::string_view cmp_record_kind(const CmpRecord& r) {
  struct Visitor {
    std::string_view operator()(const HelloRecord&) const { return "hello"; }
    std::string_view operator()(const SystemMessage&) const { return "system"; }
    std::string_view operator()(const FaultMessage&) const { return "fault"; }
    std::string_view operator()(const AckRecord&) const { return "ack"; }
    std::string_view operator()(const AlertBody&) const { return "alert"; }
  };
  return std::visit(Visitor{}, r);
}

// ---------------------------------------------------------------------------
// CAV state frame
// ---------------------------------------------------------------------------

Result<std::vector<uint8_t>> encode_cav_state(const CavStateMessage& m) {
  if (auto v = validate_cav_state(m); !v) {
    return v.error();
  }
  std::vector<uint8_t> out;
  out.reserve(kCavFrameSize);
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(kWireVersion);
  out.push_back(kCavStateMsgType);
  put_f64be(out, m.pos.lat_deg());
  put_f64be(out, m.pos.lon_deg());
  put_f64be(out, m.pos.alt_m());
  put_u64be(out, m.tx_timestamp_ms);
  put_u64be(out, m.gps_time_ms);
  put_f64be(out, m.ground_speed_mps);
  put_u32be(out, crc32_ieee(out));
  return out;
}

Result<CavStateMessage> decode_cav_state(std::span<const uint8_t> b) {
  if (b.size() != kCavFrameSize) {
    return make_error(Errc::kFrameTruncated, "length != 56");
  }
  if (b[0] != kMagic0 || b[1] != kMagic1) {
    return make_error(Errc::kBadMagic, "magic");
  }
  const uint32_t want = get_u32be(b.data() + kCavFrameSize - 4);
  const uint32_t got = crc32_ieee(b.first(kCavFrameSize - 4));
  if (want != got) {
    return make_error(Errc::kChecksumMismatch);
  }
  if (b[2] != kWireVersion) {
    return make_error(Errc::kBadMagic, "version");
  }
  if (b[3] != kCavStateMsgType) {
    return make_error(Errc::kBadMagic, "msg_type");
  }
  const double lat = get_f64be(b.data() + 4);
  const double lon = get_f64be(b.data() + 12);
  const double alt = get_f64be(b.data() + 20);
  auto pos = geo::GeoPosition::make(lat, lon, alt);
  if (!pos) {
    return pos.error();
  }
  CavStateMessage m{pos.value(), get_u64be(b.data() + 28), get_u64be(b.data() + 36),
                    get_f64be(b.data() + 44)};
  if (m.tx_timestamp_ms == 0) {
    return make_error(Errc::kOutOfRange, "tx_timestamp_ms");
  }
  if (m.gps_time_ms == 0) {
    return make_error(Errc::kOutOfRange, "gps_time_ms");
  }
  if (!(m.ground_speed_mps >= 0.0) || !std::isfinite(m.ground_speed_mps)) {
    return make_error(Errc::kOutOfRange, "ground_speed_mps");
  }
  return m;
}

// ---------------------------------------------------------------------------
// CMP stream records
// ---------------------------------------------------------------------------

Result<std::vector<uint8_t>> encode_cmp_record(const SystemMessage& m) {
  if (auto v = validate_system(m); !v) {
    return v.error();
  }
  return frame_body(body_json(m));
}

Result<std::vector<uint8_t>> encode_cmp_record(const FaultMessage& m) {
  if (auto v = validate_fault(m); !v) {
    return v.error();
  }
  return frame_body(body_json(m));
}

Result<std::vector<uint8_t>> encode_cmp_record(const CmpRecord& r) {
  struct Visitor {
    Result<std::vector<uint8_t>> operator()(const HelloRecord& h) const {
      if (h.client_id.empty()) {
        return make_error(Errc::kInvalidMessage, "client_id");
      }
      ordered_json j;
      j["kind"] = "hello";
      j["client_id"] = h.client_id;
      return frame_body(j);
    }
    Result<std::vector<uint8_t>> operator()(const SystemMessage& m) const {
      return encode_cmp_record(m);
    }
    Result<std::vector<uint8_t>> operator()(const FaultMessage& m) const {
      return encode_cmp_record(m);
    }
    Result<std::vector<uint8_t>> operator()(const AckRecord& a) const {
      ordered_json j;
      j["kind"] = "ack";
      j["seq"] = a.seq;
      j["recv_ts_ms"] = a.recv_ts_ms;
      return frame_body(j);
    }
    Result<std::vector<uint8_t>> operator()(const AlertBody& a) const {
      if (auto v = validate_fault(a.fault); !v) {
        return v.error();
      }
      ordered_json j;
      j["kind"] = "alert";
      j["alert_seq"] = a.alert_seq;
      j["fault"] = fault_fields(a.fault);
      return frame_body(j);
    }
  };
  return std::visit(Visitor{}, r);
}

DecodeProgress decode_cmp_record(std::span<const uint8_t> buffer) {
  DecodeProgress p;
  if (buffer.size() < 4) {
    p.status = DecodeProgress::Status::kNeedMoreData;
    return p;
  }
  const uint32_t len = get_u32be(buffer.data());
  if (len > kMaxCmpBody) {
    p.status = DecodeProgress::Status::kError;
    p.error = make_error(Errc::kBodyTooLarge);
    p.consumed = 0;  // stream cannot resync
    return p;
  }
  if (buffer.size() < 4u + len) {
    p.status = DecodeProgress::Status::kNeedMoreData;
    return p;
  }
  const size_t frame_len = 4u + len;
  const json body = json::parse(buffer.begin() + 4, buffer.begin() + frame_len,
                                nullptr, false);
  auto fail = [&](Error e) {
    p.status = DecodeProgress::Status::kError;
    p.error = std::move(e);
    p.consumed = frame_len;
    return p;
  };
  if (body.is_discarded() || !body.is_object()) {
    return fail(make_error(Errc::kMalformedBody, "json"));
  }
  auto kind_it = body.find("kind");
  if (kind_it == body.end() || !kind_it->is_string()) {
    return fail(make_error(Errc::kMalformedBody, "kind"));
  }
  const std::string kind = kind_it->get<std::string>();
  Result<CmpRecord> rec = [&]() -> Result<CmpRecord> {
    if (kind == "hello") return parse_hello(body);
    if (kind == "system") return parse_system(body);
    if (kind == "fault") {
      auto f = parse_fault_fields(body, "fault", true);
      if (!f) return f.error();
      return CmpRecord(f.value());
    }
    if (kind == "ack") return parse_ack(body);
    if (kind == "alert") return parse_alert(body);
    return make_error(Errc::kUnknownKind, kind);
  }();
  if (!rec) {
    return fail(rec.error());
  }
  p.status = DecodeProgress::Status::kRecord;
  p.record = std::move(rec.value());
  p.consumed = frame_len;
  return p;
}

void CmpStreamDecoder::feed(std::span<const uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

DecodeProgress CmpStreamDecoder::next() {
  DecodeProgress p = decode_cmp_record(buf_);
  if (p.consumed > 0) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<ptrdiff_t>(p.consumed));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Frame packets
// ---------------------------------------------------------------------------

Result<std::vector<uint8_t>> encode_frame_packet(const FramePacket& f) {
  if (f.payload.size() > kMaxFramePayload) {
    return make_error(Errc::kInvalidMessage, "payload too large");
  }
  if (f.capture_ts_ms < 0) {
    return make_error(Errc::kInvalidMessage, "capture_ts_ms");
  }
  std::vector<uint8_t> out;
  out.reserve(kFramePacketHeader + f.payload.size() + 4);
  out.push_back(0x46);  // 'F'
  out.push_back(0x50);  // 'P'
  out.push_back(kWireVersion);
  out.push_back(2);  // frame packet msg type
  put_u64be(out, f.frame_seq);
  put_u64be(out, static_cast<uint64_t>(f.capture_ts_ms));
  put_u32be(out, static_cast<uint32_t>(f.payload.size()));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  put_u32be(out, crc32_ieee(out));
  return out;
}

Result<FramePacket> decode_frame_packet(std::span<const uint8_t> b) {
  if (b.size() < kFramePacketHeader + 4) {
    return make_error(Errc::kFrameTruncated);
  }
  if (b[0] != 0x46 || b[1] != 0x50) {
    return make_error(Errc::kBadMagic, "magic");
  }
  const uint32_t len = get_u32be(b.data() + 20);
  if (len > kMaxFramePayload) {
    return make_error(Errc::kOutOfRange, "payload_len");
  }
  if (b.size() != kFramePacketHeader + len + 4) {
    return make_error(Errc::kFrameTruncated, "payload_len mismatch");
  }
  const uint32_t want = get_u32be(b.data() + b.size() - 4);
  const uint32_t got = crc32_ieee(b.first(b.size() - 4));
  if (want != got) {
    return make_error(Errc::kChecksumMismatch);
  }
  if (b[2] != kWireVersion || b[3] != 2) {
    return make_error(Errc::kBadMagic, "version");
  }
  FramePacket f;
  f.frame_seq = get_u64be(b.data() + 4);
  f.capture_ts_ms = static_cast<int64_t>(get_u64be(b.data() + 12));
  f.payload.assign(b.begin() + kFramePacketHeader, b.end() - 4);
  return f;
}

}  // namespace v2xrelay::wire
