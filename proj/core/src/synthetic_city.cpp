#include "bsdloc/synthetic_city.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bsdloc {

namespace {

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double next() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * next(); }
  std::uint64_t below(std::uint64_t n) { return rng_() % n; }

 private:
  std::mt19937_64 rng_;
};

struct Segment {
  int a;
  int b;
};

bool connected(int node_count, const std::vector<Segment>& segs, const std::vector<bool>& alive) {
  std::vector<std::vector<int>> adj(node_count);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!alive[i]) continue;
    adj[segs[i].a].push_back(segs[i].b);
    adj[segs[i].b].push_back(segs[i].a);
  }
  std::vector<bool> seen(node_count, false);
  std::vector<int> stack = {0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    for (int m : adj[n]) {
      if (!seen[m]) {
        seen[m] = true;
        ++count;
        stack.push_back(m);
      }
    }
  }
  return count == node_count;
}

}  // namespace

void SyntheticCityParams::validate() const {
  if (rows < 2 || cols < 2) throw std::invalid_argument("SyntheticCityParams: need >= 2 rows and cols");
  if (!(block_size > 0.0)) throw std::invalid_argument("SyntheticCityParams: block_size must be positive");
  auto fraction = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!fraction(building_coverage) || !fraction(gap_frequency) || !fraction(street_drop)) {
    throw std::invalid_argument("SyntheticCityParams: fractions must lie in [0, 1]");
  }
  if (!(grid_snap >= 0.0) || grid_snap * 2.0 > block_size * (1.0 - 2.0 * line_jitter)) {
    throw std::invalid_argument("SyntheticCityParams: grid_snap must be >= 0 and small against blocks");
  }
  if (!(line_jitter >= 0.0 && line_jitter < 0.5)) {
    throw std::invalid_argument("SyntheticCityParams: line_jitter must lie in [0, 0.5)");
  }
  if (!(setback > 0.0 && building_depth > 0.0 && lot_min > 0.0 && lot_max >= lot_min &&
        gap_min_width > 0.0 && gap_max_width >= gap_min_width)) {
    throw std::invalid_argument("SyntheticCityParams: building geometry must be positive");
  }
}

SyntheticCity generate_synthetic_city(const SyntheticCityParams& p) {
  p.validate();
  Uniform rng(p.seed);

  std::vector<double> xs(p.cols);
  std::vector<double> ys(p.rows);
  for (int c = 0; c < p.cols; ++c) {
    xs[c] = c * p.block_size + rng.range(-p.line_jitter, p.line_jitter) * p.block_size;
  }
  for (int r = 0; r < p.rows; ++r) {
    ys[r] = r * p.block_size + rng.range(-p.line_jitter, p.line_jitter) * p.block_size;
  }
  if (p.grid_snap > 0.0) {
    for (auto* v : {&xs, &ys}) {
      for (auto& c : *v) c = std::round(c / p.grid_snap) * p.grid_snap;
    }
  }
  const int node_count = p.rows * p.cols;
  auto node_id = [&](int r, int c) { return r * p.cols + c; };
  auto node_pos = [&](int n) { return GeoPoint{xs[n % p.cols], ys[n / p.cols]}; };

  std::vector<Segment> segs;
  for (int r = 0; r < p.rows; ++r) {
    for (int c = 0; c + 1 < p.cols; ++c) segs.push_back({node_id(r, c), node_id(r, c + 1)});
  }
  for (int c = 0; c < p.cols; ++c) {
    for (int r = 0; r + 1 < p.rows; ++r) segs.push_back({node_id(r, c), node_id(r + 1, c)});
  }

  std::vector<bool> alive(segs.size(), true);
  const auto to_drop = static_cast<std::size_t>(std::floor(p.street_drop * static_cast<double>(segs.size())));
  if (to_drop > 0) {
    std::vector<std::size_t> order(segs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::size_t dropped = 0;
    for (std::size_t idx : order) {
      if (dropped == to_drop) break;
      alive[idx] = false;
      if (connected(node_count, segs, alive)) {
        ++dropped;
      } else {
        alive[idx] = true;
      }
    }
  }

  std::vector<NodePolyline> roads;
  std::vector<Polyline> road_lines;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!alive[i]) continue;
    const GeoPoint a = node_pos(segs[i].a);
    const GeoPoint b = node_pos(segs[i].b);
    roads.push_back({{segs[i].a, segs[i].b}, {a, b}});
    road_lines.push_back({a, b});
  }
  RoadGraph graph = build_road_graph(roads);

  // One open corner quadrant per junction, the rest built up to the cross street.
  std::vector<int> open_quadrant(node_count);
  for (auto& q : open_quadrant) q = static_cast<int>(rng.below(4));
  auto quadrant = [](double dx, double dy) { return (dx > 0.0 ? 1 : 0) | (dy > 0.0 ? 2 : 0); };
  auto corner_open = [&](int node, double dx, double dy) {
    return !p.open_corners.has_value() ? open_quadrant[node] == quadrant(dx, dy) : *p.open_corners;
  };

  std::vector<int> arms(node_count, 0);
  auto arm_bit = [](double dx, double dy) {
    if (std::abs(dx) >= std::abs(dy)) return dx > 0.0 ? 1 : 4;
    return dy > 0.0 ? 2 : 8;
  };
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!alive[i]) continue;
    const GeoPoint a = node_pos(segs[i].a);
    const GeoPoint b = node_pos(segs[i].b);
    arms[segs[i].a] |= arm_bit(b.x - a.x, b.y - a.y);
    arms[segs[i].b] |= arm_bit(a.x - b.x, a.y - b.y);
  }

  std::vector<Polygon> buildings;
  const double open_clearance = p.setback + p.building_depth + 1.0;
  const double closed_clearance = p.setback + 0.5;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!alive[i]) continue;
    const GeoPoint a = node_pos(segs[i].a);
    const GeoPoint b = node_pos(segs[i].b);
    const double len = distance(a, b);
    const double ux = (b.x - a.x) / len;
    const double uy = (b.y - a.y) / len;
    for (int side : {1, -1}) {
      // left normal is (-uy, ux); side -1 mirrors it
      const double nx = -uy * side;
      const double ny = ux * side;
      auto end_clearance = [&](int node, double dx, double dy) {
        if (corner_open(node, dx + nx, dy + ny)) return open_clearance;
        return (arms[node] & arm_bit(nx, ny)) != 0 ? closed_clearance : 0.0;
      };
      const double start = end_clearance(segs[i].a, ux, uy);
      const double end = end_clearance(segs[i].b, -ux, -uy);
      const double clearance = start;
      const bool start_closed = start < open_clearance;
      const bool end_closed = end < open_clearance;
      const double face = len - start - end;
      if (face < p.lot_min) continue;
      auto corner = [&](double along, double off) {
        return GeoPoint{a.x + ux * along + nx * off, a.y + uy * along + ny * off};
      };
      auto emit = [&](double from, double to) {
        if (to - from <= 0.5) return;
        const double s0 = from + clearance;
        const double s1 = to + clearance;
        const double o0 = p.setback;
        const double o1 = p.setback + p.building_depth;
        Polygon ring = {corner(s0, o0), corner(s1, o0), corner(s1, o1), corner(s0, o1)};
        if (polygon_signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());
        buildings.push_back(std::move(ring));
      };

      double cursor = 0.0;
      double run_start = -1.0;
      bool first = true;
      bool first_lot = true;
      while (cursor < face) {
        const bool tail = face - cursor < p.gap_max_width + p.lot_min;
        if (!first && rng.next() < p.gap_frequency && !(end_closed && tail)) {
          if (run_start >= 0.0) emit(run_start, cursor);
          run_start = -1.0;
          cursor += rng.range(p.gap_min_width, p.gap_max_width);
          if (cursor >= face) break;
        }
        first = false;
        double width = rng.range(p.lot_min, p.lot_max);
        if (face - (cursor + width) < p.lot_min) width = face - cursor;
        const bool last = cursor + width >= face;
        const bool built = rng.next() < p.building_coverage || (first_lot && start_closed) ||
                           (last && end_closed);
        first_lot = false;
        if (built) {
          if (run_start < 0.0) run_start = cursor;
        } else if (run_start >= 0.0) {
          emit(run_start, cursor);
          run_start = -1.0;
        }
        cursor += width;
      }
      if (run_start >= 0.0) emit(run_start, std::min(cursor, face));
    }
  }

  SemanticMap map(graph.junction_points(), std::move(buildings), std::move(road_lines));
  return {std::move(map), std::move(graph)};
}

}  // namespace bsdloc
