#include "bsdloc/geo.hpp"

#include <stdexcept>

namespace bsdloc {

GeoPoint project_to_local(double latitude, double longitude, const LatLon& origin) {
  if (!std::isfinite(latitude) || !std::isfinite(longitude) || !std::isfinite(origin.lat) ||
      !std::isfinite(origin.lon)) {
    throw std::invalid_argument("project_to_local: non-finite coordinate");
  }
  if (std::abs(latitude) > 90.0 || std::abs(origin.lat) > 90.0) {
    throw std::invalid_argument("project_to_local: latitude outside [-90, 90]");
  }
  const double dlat = deg_to_rad(latitude - origin.lat);
  const double dlon = deg_to_rad(longitude - origin.lon);
  return {kEarthRadiusM * std::cos(deg_to_rad(origin.lat)) * dlon, kEarthRadiusM * dlat};
}

LatLon unproject(const GeoPoint& p, const LatLon& origin) {
  const double lat = origin.lat + rad_to_deg(p.y / kEarthRadiusM);
  const double lon =
      origin.lon + rad_to_deg(p.x / (kEarthRadiusM * std::cos(deg_to_rad(origin.lat))));
  return {lat, lon};
}

double normalize_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod of a tiny negative value can round back up to 360
  if (r >= 360.0) r = 0.0;
  return r;
}

double smallest_angle_deg(double a, double b) {
  const double d = normalize_deg(a - b);
  return d > 180.0 ? 360.0 - d : d;
}

double signed_angle_deg(double from, double to) {
  const double d = normalize_deg(to - from);
  return d > 180.0 ? d - 360.0 : d;
}

double bearing_deg(const GeoPoint& from, const GeoPoint& to) {
  return normalize_deg(rad_to_deg(std::atan2(to.y - from.y, to.x - from.x)));
}

}  // namespace bsdloc
