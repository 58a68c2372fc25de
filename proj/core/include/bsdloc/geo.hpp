#pragma once

#include <cmath>
#include <numbers>

namespace bsdloc {

/// Point in the local metric frame: meters east (x) and north (y) of the map origin.
struct GeoPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

inline constexpr double kEarthRadiusM = 6371000.0;

/// Equirectangular projection about `origin`. Throws std::invalid_argument on
/// non-finite input or |lat| > 90.
GeoPoint project_to_local(double latitude, double longitude, const LatLon& origin);

/// Inverse of project_to_local.
LatLon unproject(const GeoPoint& p, const LatLon& origin);

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Maps any finite angle to [0, 360).
double normalize_deg(double deg);

/// Absolute value of the smallest angle between two headings, in [0, 180].
double smallest_angle_deg(double a, double b);

/// Signed difference `to - from` wrapped to (-180, 180].
double signed_angle_deg(double from, double to);

/// Angle of the vector from `from` to `to`, counter-clockwise from east, in [0, 360).
double bearing_deg(const GeoPoint& from, const GeoPoint& to);

inline double distance(const GeoPoint& a, const GeoPoint& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

inline GeoPoint offset(const GeoPoint& p, double heading_deg, double length) {
  const double r = deg_to_rad(heading_deg);
  return {p.x + length * std::cos(r), p.y + length * std::sin(r)};
}

}  // namespace bsdloc
