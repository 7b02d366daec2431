#pragma once

#include "v2xrelay/result.hpp"

namespace v2xrelay::geo {

inline constexpr double kEarthRadiusM = 6'371'000.0;

// WGS-84 style lat/lon/alt triple. Construction goes through make() and is
// range-checked; an instance always satisfies the invariants.
class GeoPosition {
 public:
  static Result<GeoPosition> make(double lat_deg, double lon_deg, double alt_m);

  double lat_deg() const { return lat_deg_; }
  double lon_deg() const { return lon_deg_; }
  double alt_m() const { return alt_m_; }

  bool operator==(const GeoPosition&) const = default;

 private:
  GeoPosition(double lat_deg, double lon_deg, double alt_m)
      : lat_deg_(lat_deg), lon_deg_(lon_deg), alt_m_(alt_m) {}

  double lat_deg_;
  double lon_deg_;
  double alt_m_;
};

Result<GeoPosition> make_position(double lat_deg, double lon_deg, double alt_m);

// Haversine great-circle distance on a sphere of radius kEarthRadiusM.
// Altitude is ignored.
double surface_distance_m(const GeoPosition& a, const GeoPosition& b);

// 3-D range: sqrt(surface^2 + dAlt^2). Used by the air link channel model.
double slant_distance_m(const GeoPosition& a, const GeoPosition& b);

// Local tangent-plane offset helper for building scenario geometry at
// parking-lot scale. East/north displacements in meters from `origin`.
Result<GeoPosition> offset_position(const GeoPosition& origin, double east_m,
                                    double north_m, double alt_m);

}  // namespace v2xrelay::geo
