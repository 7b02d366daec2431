#include "v2xrelay/geo.hpp"

#include <cmath>

namespace v2xrelay {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kOutOfRange: return "OutOfRange";
    case Errc::kInvalidMessage: return "InvalidMessage";
    case Errc::kFrameTruncated: return "FrameTruncated";
    case Errc::kBadMagic: return "BadMagic";
    case Errc::kChecksumMismatch: return "ChecksumMismatch";
    case Errc::kBodyTooLarge: return "BodyTooLarge";
    case Errc::kMalformedBody: return "MalformedBody";
    case Errc::kUnknownKind: return "UnknownKind";
    case Errc::kNotConnected: return "NotConnected";
    case Errc::kUnregisteredClient: return "UnregisteredClient";
    case Errc::kProtocolError: return "ProtocolError";
    case Errc::kDuplicateRecord: return "DuplicateRecord";
    case Errc::kCausalityViolation: return "CausalityViolation";
    case Errc::kBadKey: return "BadKey";
    case Errc::kConnectionClosed: return "ConnectionClosed";
    case Errc::kProtocolViolation: return "ProtocolViolation";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kPortInUse: return "PortInUse";
    case Errc::kParseError: return "ParseError";
    case Errc::kIoError: return "IoError";
    case Errc::kChainBroken: return "ChainBroken";
  }
  return "Unknown";
}

std::string Error::to_string() const {
  std::string s = errc_name(code);
  if (!detail.empty()) {
    s += "(";
    s += detail;
    s += ")";
  }
  return s;
}

namespace geo {
namespace {

constexpr double kDegToRad = M_PI / 180.0;

}  // namespace

Result<GeoPosition> GeoPosition::make(double lat_deg, double lon_deg,
                                      double alt_m) {
  if (!(lat_deg >= -90.0 && lat_deg <= 90.0)) {
    return make_error(Errc::kOutOfRange, "lat_deg");
  }
  if (!(lon_deg >= -180.0 && lon_deg <= 180.0)) {
    return make_error(Errc::kOutOfRange, "lon_deg");
  }
  if (!std::isfinite(alt_m)) {
    return make_error(Errc::kOutOfRange, "alt_m");
  }
  return GeoPosition(lat_deg, lon_deg, alt_m);
}

Result<GeoPosition> make_position(double lat_deg, double lon_deg,
                                  double alt_m) {
  return GeoPosition::make(lat_deg, lon_deg, alt_m);
}

double surface_distance_m(const GeoPosition& a, const GeoPosition& b) {
  const double lat1 = a.lat_deg() * kDegToRad;
  const double lat2 = b.lat_deg() * kDegToRad;
  const double dlat = (b.lat_deg() - a.lat_deg()) * kDegToRad;
  const double dlon = (b.lon_deg() - a.lon_deg()) * kDegToRad;

  const double sdlat = std::sin(dlat / 2.0);
  const double sdlon = std::sin(dlon / 2.0);
  const double h =
      sdlat * sdlat + std::cos(lat1) * std::cos(lat2) * sdlon * sdlon;
  const double c = 2.0 * std::asin(std::min(1.0, std::sqrt(h)));
  return kEarthRadiusM * c;
}

double slant_distance_m(const GeoPosition& a, const GeoPosition& b) {
  const double s = surface_distance_m(a, b);
  const double dalt = a.alt_m() - b.alt_m();
  return std::sqrt(s * s + dalt * dalt);
}

Result<GeoPosition> offset_position(const GeoPosition& origin, double east_m,
                                    double north_m, double alt_m) {
  const double dlat = (north_m / kEarthRadiusM) / kDegToRad;
  const double coslat = std::cos(origin.lat_deg() * kDegToRad);
  const double dlon = (east_m / (kEarthRadiusM * coslat)) / kDegToRad;
  return GeoPosition::make(origin.lat_deg() + dlat, origin.lon_deg() + dlon,
                           alt_m);
}

}  // namespace geo
}  // namespace v2xrelay
