#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "bsdloc/bsd.hpp"
#include "bsdloc/geo.hpp"

namespace bsdloc {

using PlaceId = std::uint32_t;
using LocationId = std::uint32_t;
inline constexpr PlaceId kNoPlace = std::numeric_limits<PlaceId>::max();

/// Simple polygon ring. The closing vertex is implicit (front() is not repeated).
using Polygon = std::vector<GeoPoint>;
using Polyline = std::vector<GeoPoint>;

/// A road sample point paired with a travel heading.
///
/// `heading` is counter-clockwise from east in [0, 360). `from_place` is the
/// neighbouring sample the traveller arrived from; it is kNoPlace only for the
/// outward-facing location at a dead end, where no arrival exists.
struct DirectedLocation {
  LocationId id = 0;
  PlaceId place = 0;
  GeoPoint position;
  double heading = 0.0;
  PlaceId from_place = kNoPlace;

  friend bool operator==(const DirectedLocation&, const DirectedLocation&) = default;
};

/// Viewing sector used for feature presence tests.
struct SectorSpec {
  double radius = 30.0;
  double half_angle = 45.0;
  /// Angular spacing of the rays cast for gap detection.
  double ray_step = 1.0;
  /// Minimum angular width of an unobstructed run that counts as a gap.
  double min_gap = 15.0;
  /// Junctions closer than this to the location are the one underfoot.
  double junction_exclusion = 1.0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  friend bool operator==(const SectorSpec&, const SectorSpec&) = default;
};

double polygon_signed_area(const Polygon& ring);
bool point_in_polygon(const GeoPoint& p, const Polygon& ring);

/// Closed segment intersection test (touching and collinear overlap count).
bool segments_intersect(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c, const GeoPoint& d);

/// Junction points, building footprints and road centerlines in the local frame.
///
/// Immutable after construction. Buildings with fewer than three vertices or
/// near-zero area are kept for round-tripping but excluded from every query;
/// degenerate_buildings() reports how many were dropped.
class SemanticMap {
 public:
  SemanticMap() = default;
  SemanticMap(std::vector<GeoPoint> junctions, std::vector<Polygon> buildings,
              std::vector<Polyline> roads);

  const std::vector<GeoPoint>& junctions() const { return junctions_; }
  const std::vector<Polygon>& buildings() const { return buildings_; }
  const std::vector<Polyline>& roads() const { return roads_; }
  std::size_t degenerate_buildings() const { return degenerate_; }

  /// Indices of junctions in grid cells overlapping the disc (superset of the disc).
  std::vector<std::size_t> junction_candidates(const GeoPoint& c, double radius) const;

  struct Edge {
    GeoPoint a;
    GeoPoint b;
    std::uint32_t building = 0;
  };
  /// Building edges in grid cells overlapping the disc, deduplicated.
  std::vector<Edge> edge_candidates(const GeoPoint& c, double radius) const;
  /// Indices of valid buildings whose bounding box intersects the disc.
  std::vector<std::uint32_t> building_candidates(const GeoPoint& c, double radius) const;

 private:
  struct Cell {
    std::vector<std::uint32_t> junctions;
    std::vector<std::uint32_t> edges;
    std::vector<std::uint32_t> buildings;
  };
  static std::int64_t cell_key(std::int32_t cx, std::int32_t cy);
  std::int32_t cell_coord(double v) const;
  template <typename F>
  void for_cells(const GeoPoint& c, double radius, F&& f) const;

  std::vector<GeoPoint> junctions_;
  std::vector<Polygon> buildings_;
  std::vector<Polyline> roads_;
  std::size_t degenerate_ = 0;

  double cell_size_ = 32.0;
  std::vector<Edge> edges_;
  struct Box {
    double min_x, min_y, max_x, max_y;
  };
  std::vector<Box> building_boxes_;
  std::unordered_map<std::int64_t, Cell> cells_;
};

/// True iff `point` lies within spec.radius of `center` and its bearing is
/// within ±spec.half_angle of the view axis; both boundaries inclusive.
bool sector_contains(const GeoPoint& center, double heading, View view, const SectorSpec& spec,
                     const GeoPoint& point);

/// Junction presence in the front or back sector.
bool junc_bit(const DirectedLocation& loc, const SemanticMap& map, View view,
              const SectorSpec& spec);

/// Per-ray obstruction flags for a sector centred on `axis_deg`. Ray i is cast
/// at axis - half_angle + (i + 0.5) * ray_step and clipped to spec.radius.
std::vector<bool> ray_coverage(const GeoPoint& center, double axis_deg, const SemanticMap& map,
                               const SectorSpec& spec);

/// Number of consecutive unobstructed rays needed to call a gap.
int gap_run_threshold(const SectorSpec& spec);
int longest_uncovered_run(const std::vector<bool>& covered);

/// Gap-between-buildings presence in the left or right sector.
bool gap_bit(const DirectedLocation& loc, const SemanticMap& map, View view,
             const SectorSpec& spec);

/// View axis for a travel heading, snapped so that opposite headings produce
/// bit-identical axes.
double view_axis_deg(double heading, View view);

Bsd ground_truth_bsd(const DirectedLocation& loc, const SemanticMap& map, const SectorSpec& spec);

}  // namespace bsdloc
