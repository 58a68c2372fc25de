#include "bsdloc/semantic_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bsdloc {

namespace {

double orient(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool within_box(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

constexpr double kMinBuildingArea = 1e-6;

}  // namespace

void SectorSpec::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("SectorSpec: radius must be positive");
  }
  if (!(half_angle > 0.0 && half_angle <= 90.0)) {
    throw std::invalid_argument("SectorSpec: half_angle must be in (0, 90]");
  }
  if (!(ray_step > 0.0 && ray_step <= 2.0 * half_angle)) {
    throw std::invalid_argument("SectorSpec: ray_step must be in (0, 2*half_angle]");
  }
  if (!(min_gap > 0.0) || junction_exclusion < 0.0) {
    throw std::invalid_argument("SectorSpec: min_gap must be positive");
  }
}

double polygon_signed_area(const Polygon& ring) {
  double a = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const GeoPoint& p = ring[i];
    const GeoPoint& q = ring[(i + 1) % ring.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

bool point_in_polygon(const GeoPoint& p, const Polygon& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool segments_intersect(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c,
                        const GeoPoint& d) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
    return true;
  }
  if (o1 == 0 && within_box(a, b, c)) return true;
  if (o2 == 0 && within_box(a, b, d)) return true;
  if (o3 == 0 && within_box(c, d, a)) return true;
  if (o4 == 0 && within_box(c, d, b)) return true;
  return false;
}

SemanticMap::SemanticMap(std::vector<GeoPoint> junctions, std::vector<Polygon> buildings,
                         std::vector<Polyline> roads)
    : junctions_(std::move(junctions)), buildings_(std::move(buildings)), roads_(std::move(roads)) {
  for (std::uint32_t i = 0; i < junctions_.size(); ++i) {
    const auto& p = junctions_[i];
    cells_[cell_key(cell_coord(p.x), cell_coord(p.y))].junctions.push_back(i);
  }
  building_boxes_.resize(buildings_.size(), Box{0, 0, 0, 0});
  for (std::uint32_t bi = 0; bi < buildings_.size(); ++bi) {
    auto& ring = buildings_[bi];
    if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
    if (ring.size() < 3 || std::abs(polygon_signed_area(ring)) < kMinBuildingArea) {
      ++degenerate_;
      continue;
    }
    Box box{ring[0].x, ring[0].y, ring[0].x, ring[0].y};
    for (const auto& p : ring) {
      box.min_x = std::min(box.min_x, p.x);
      box.min_y = std::min(box.min_y, p.y);
      box.max_x = std::max(box.max_x, p.x);
      box.max_y = std::max(box.max_y, p.y);
    }
    building_boxes_[bi] = box;
    for (std::int32_t cx = cell_coord(box.min_x); cx <= cell_coord(box.max_x); ++cx) {
      for (std::int32_t cy = cell_coord(box.min_y); cy <= cell_coord(box.max_y); ++cy) {
        cells_[cell_key(cx, cy)].buildings.push_back(bi);
      }
    }
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const GeoPoint& a = ring[k];
      const GeoPoint& b = ring[(k + 1) % ring.size()];
      const auto edge_index = static_cast<std::uint32_t>(edges_.size());
      edges_.push_back({a, b, bi});
      const std::int32_t x0 = cell_coord(std::min(a.x, b.x));
      const std::int32_t x1 = cell_coord(std::max(a.x, b.x));
      const std::int32_t y0 = cell_coord(std::min(a.y, b.y));
      const std::int32_t y1 = cell_coord(std::max(a.y, b.y));
      for (std::int32_t cx = x0; cx <= x1; ++cx) {
        for (std::int32_t cy = y0; cy <= y1; ++cy) {
          cells_[cell_key(cx, cy)].edges.push_back(edge_index);
        }
      }
    }
  }
}

std::int64_t SemanticMap::cell_key(std::int32_t cx, std::int32_t cy) {
  return (static_cast<std::int64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy);
}

std::int32_t SemanticMap::cell_coord(double v) const {
  return static_cast<std::int32_t>(std::floor(v / cell_size_));
}

template <typename F>
void SemanticMap::for_cells(const GeoPoint& c, double radius, F&& f) const {
  const std::int32_t x0 = cell_coord(c.x - radius);
  const std::int32_t x1 = cell_coord(c.x + radius);
  const std::int32_t y0 = cell_coord(c.y - radius);
  const std::int32_t y1 = cell_coord(c.y + radius);
  for (std::int32_t cx = x0; cx <= x1; ++cx) {
    for (std::int32_t cy = y0; cy <= y1; ++cy) {
      auto it = cells_.find(cell_key(cx, cy));
      if (it != cells_.end()) f(it->second);
    }
  }
}

std::vector<std::size_t> SemanticMap::junction_candidates(const GeoPoint& c, double radius) const {
  std::vector<std::size_t> out;
  for_cells(c, radius, [&](const Cell& cell) {
    out.insert(out.end(), cell.junctions.begin(), cell.junctions.end());
  });
  return out;
}

std::vector<SemanticMap::Edge> SemanticMap::edge_candidates(const GeoPoint& c,
                                                            double radius) const {
  std::vector<std::uint32_t> ids;
  for_cells(c, radius, [&](const Cell& cell) {
    ids.insert(ids.end(), cell.edges.begin(), cell.edges.end());
  });
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<Edge> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(edges_[id]);
  return out;
}

std::vector<std::uint32_t> SemanticMap::building_candidates(const GeoPoint& c,
                                                            double radius) const {
  std::vector<std::uint32_t> ids;
  for_cells(c, radius, [&](const Cell& cell) {
    ids.insert(ids.end(), cell.buildings.begin(), cell.buildings.end());
  });
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::uint32_t> out;
  for (auto bi : ids) {
    const Box& b = building_boxes_[bi];
    if (b.max_x >= c.x - radius && b.min_x <= c.x + radius && b.max_y >= c.y - radius &&
        b.min_y <= c.y + radius) {
      out.push_back(bi);
    }
  }
  return out;
}

double view_axis_deg(double heading, View view) {
  double a = normalize_deg(heading + view_axis_offset_deg(view));
  a = std::round(a * 1e6) / 1e6;
  return a >= 360.0 ? a - 360.0 : a;
}

bool sector_contains(const GeoPoint& center, double heading, View view, const SectorSpec& spec,
                     const GeoPoint& point) {
  const double d = distance(center, point);
  if (d > spec.radius || d == 0.0) return false;
  return smallest_angle_deg(bearing_deg(center, point), view_axis_deg(heading, view)) <=
         spec.half_angle;
}

bool junc_bit(const DirectedLocation& loc, const SemanticMap& map, View view,
              const SectorSpec& spec) {
  if (view != View::kFront && view != View::kBack) {
    throw std::invalid_argument("junc_bit: view must be front or back");
  }
  for (auto idx : map.junction_candidates(loc.position, spec.radius)) {
    const GeoPoint& j = map.junctions()[idx];
    if (distance(loc.position, j) < spec.junction_exclusion) continue;
    if (sector_contains(loc.position, loc.heading, view, spec, j)) return true;
  }
  return false;
}

std::vector<bool> ray_coverage(const GeoPoint& center, double axis_deg, const SemanticMap& map,
                               const SectorSpec& spec) {
  const auto n_rays = static_cast<std::size_t>(std::llround(2.0 * spec.half_angle / spec.ray_step));
  std::vector<bool> covered(n_rays, false);
  for (auto bi : map.building_candidates(center, spec.radius)) {
    if (point_in_polygon(center, map.buildings()[bi])) {
      covered.assign(n_rays, true);
      return covered;
    }
  }
  const auto edges = map.edge_candidates(center, spec.radius);
  for (std::size_t i = 0; i < n_rays; ++i) {
    const double angle = axis_deg - spec.half_angle + (static_cast<double>(i) + 0.5) * spec.ray_step;
    const GeoPoint end = offset(center, angle, spec.radius);
    for (const auto& e : edges) {
      if (segments_intersect(center, end, e.a, e.b)) {
        covered[i] = true;
        break;
      }
    }
  }
  return covered;
}

int gap_run_threshold(const SectorSpec& spec) {
  return static_cast<int>(std::ceil(spec.min_gap / spec.ray_step - 1e-9));
}

int longest_uncovered_run(const std::vector<bool>& covered) {
  int best = 0;
  int run = 0;
  for (bool c : covered) {
    run = c ? 0 : run + 1;
    best = std::max(best, run);
  }
  return best;
}

bool gap_bit(const DirectedLocation& loc, const SemanticMap& map, View view,
             const SectorSpec& spec) {
  if (view != View::kLeft && view != View::kRight) {
    throw std::invalid_argument("gap_bit: view must be left or right");
  }
  const auto covered = ray_coverage(loc.position, view_axis_deg(loc.heading, view), map, spec);
  return longest_uncovered_run(covered) >= gap_run_threshold(spec);
}

Bsd ground_truth_bsd(const DirectedLocation& loc, const SemanticMap& map, const SectorSpec& spec) {
  return Bsd(junc_bit(loc, map, View::kFront, spec), junc_bit(loc, map, View::kBack, spec),
             gap_bit(loc, map, View::kLeft, spec), gap_bit(loc, map, View::kRight, spec));
}

}  // namespace bsdloc
