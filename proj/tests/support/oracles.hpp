#pragma once

#include <bsdloc/experiments.hpp>
#include <bsdloc/synthetic_city.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using bsdloc::GeoPoint;
using bsdloc::Polygon;

inline double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline double wrap360(double a) {
  a = std::fmod(a, 360.0);
  return a < 0.0 ? a + 360.0 : a;
}

/// Angular interval [start, start + width] in degrees, start in [0, 360).
struct Arc {
  double start;
  double width;
  bool contains(double a) const {
    const double d = wrap360(a - start);
    return d <= width;
  }
};

inline bool inside(const GeoPoint& p, const Polygon& ring) {
  bool in = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

/// Directions (from `c`) in which a ray of length r meets the segment a-b:
/// the angle subtended by the part of the segment inside the disc.
inline bool edge_arc(const GeoPoint& c, double r, const GeoPoint& a, const GeoPoint& b, Arc& out) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double fx = a.x - c.x, fy = a.y - c.y;
  const double A = dx * dx + dy * dy;
  const double B = 2.0 * (fx * dx + fy * dy);
  const double C = fx * fx + fy * fy - r * r;
  const double disc = B * B - 4.0 * A * C;
  if (A == 0.0 || disc < 0.0) return false;
  const double s = std::sqrt(disc);
  const double t0 = std::max(0.0, (-B - s) / (2.0 * A));
  const double t1 = std::min(1.0, (-B + s) / (2.0 * A));
  if (t0 > t1) return false;
  const double a0 = wrap360(deg(std::atan2(fy + t0 * dy, fx + t0 * dx)));
  const double a1 = wrap360(deg(std::atan2(fy + t1 * dy, fx + t1 * dx)));
  const double ccw = wrap360(a1 - a0);
  out = ccw <= 180.0 ? Arc{a0, ccw} : Arc{a1, 360.0 - ccw};
  return true;
}

/// Covered flags at the ray angles axis - half + (i + 0.5) * step, computed
/// from exact per-edge angular intervals.
inline std::vector<bool> exact_coverage(const GeoPoint& c, double axis, const std::vector<Polygon>& buildings,
                                        double radius, double half, double step) {
  const auto n = static_cast<std::size_t>(std::llround(2.0 * half / step));
  for (const auto& b : buildings) {
    if (inside(c, b)) return std::vector<bool>(n, true);
  }
  std::vector<Arc> arcs;
  for (const auto& b : buildings) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      Arc arc{};
      if (edge_arc(c, radius, b[i], b[(i + 1) % b.size()], arc)) arcs.push_back(arc);
    }
  }
  std::vector<bool> covered(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = axis - half + (static_cast<double>(i) + 0.5) * step;
    for (const auto& arc : arcs) {
      if (arc.contains(a)) {
        covered[i] = true;
        break;
      }
    }
  }
  return covered;
}

inline bool exact_gap(const GeoPoint& c, double axis, const std::vector<Polygon>& buildings,
                      const bsdloc::SectorSpec& spec) {
  const auto cov = exact_coverage(c, axis, buildings, spec.radius, spec.half_angle, spec.ray_step);
  int run = 0, best = 0;
  for (bool x : cov) {
    run = x ? 0 : run + 1;
    best = std::max(best, run);
  }
  return best >= static_cast<int>(std::ceil(spec.min_gap / spec.ray_step - 1e-9));
}

/// Number of simple paths with `length` nodes that never repeat a key.
inline std::uint64_t count_paths(const std::vector<std::vector<std::uint32_t>>& out,
                                 const std::vector<std::uint32_t>& key, std::size_t length) {
  std::uint64_t total = 0;
  std::vector<bool> used(*std::max_element(key.begin(), key.end()) + 1, false);
  auto dfs = [&](auto&& self, std::uint32_t v, std::size_t depth) -> void {
    if (depth == length) {
      ++total;
      return;
    }
    for (auto w : out[v]) {
      if (used[key[w]]) continue;
      used[key[w]] = true;
      self(self, w, depth + 1);
      used[key[w]] = false;
    }
  };
  for (std::uint32_t v = 0; v < out.size(); ++v) {
    used[key[v]] = true;
    dfs(dfs, v, 1);
    used[key[v]] = false;
  }
  return total;
}

inline int popcount_distance(const bsdloc::BitString& a, const bsdloc::BitString& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a.get(i) != b.get(i);
  return d;
}

/// (minimum distance, ids at that distance) by exhaustive comparison.
inline std::pair<int, std::vector<std::uint32_t>> linear_min(const std::vector<bsdloc::BitString>& rows,
                                                             const bsdloc::BitString& q) {
  int best = 1 << 30;
  std::vector<std::uint32_t> ids;
  for (std::uint32_t i = 0; i < rows.size(); ++i) {
    const int d = popcount_distance(rows[i], q);
    if (d < best) {
      best = d;
      ids.clear();
    }
    if (d == best) ids.push_back(i);
  }
  return {best, ids};
}

/// Posterior over candidate descriptors given an observed one, by direct
/// product of per-bit likelihoods.
inline std::vector<double> bayes_posterior(const std::vector<bsdloc::BitString>& candidates,
                                           const bsdloc::BitString& observed, double q) {
  std::vector<double> w;
  double z = 0.0;
  for (const auto& c : candidates) {
    double p = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) p *= c.get(i) == observed.get(i) ? q : 1.0 - q;
    w.push_back(p);
    z += p;
  }
  for (auto& x : w) x /= z;
  return w;
}

/// Descriptor and turn bits of a location route, computed from the graph.
inline std::pair<std::string, std::string> route_code(const bsdloc::LocationGraph& g,
                                                      const std::vector<std::uint32_t>& route) {
  std::string desc, turns;
  for (std::size_t k = 0; k < route.size(); ++k) {
    const auto b = g.bsd[route[k]].bits();
    for (int i = 0; i < 4; ++i) desc.push_back(((b >> i) & 1) ? '1' : '0');
    if (k > 0) {
      double d = std::fabs(g.heading[route[k]] - g.heading[route[k - 1]]);
      d = std::fmod(d, 360.0);
      if (d > 180.0) d = 360.0 - d;
      turns.push_back(d >= g.turn_threshold ? '1' : '0');
    }
  }
  return {desc, turns};
}

/// True when every group of routes sharing descriptor and turn pattern also
/// shares its place sequence. Routes are enumerated by plain recursion.
inline bool routes_unique(const bsdloc::LocationGraph& g, std::size_t length) {
  std::vector<std::vector<std::uint32_t>> out(g.size());
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    for (auto w : g.adjacency.successors(v)) out[v].push_back(w);
  }
  std::map<std::pair<std::string, std::string>, std::vector<std::uint32_t>> seen;
  std::vector<std::uint32_t> path;
  std::vector<bool> used(g.place_count, false);
  bool ok = true;
  auto dfs = [&](auto&& self, std::uint32_t v) -> void {
    if (!ok) return;
    path.push_back(v);
    used[g.place[v]] = true;
    if (path.size() == length) {
      std::vector<std::uint32_t> places;
      for (auto x : path) places.push_back(g.place[x]);
      auto [it, fresh] = seen.try_emplace(route_code(g, path), places);
      if (!fresh && it->second != places) ok = false;
    } else {
      for (auto w : out[v]) {
        if (!used[g.place[w]]) self(self, w);
      }
    }
    used[g.place[v]] = false;
    path.pop_back();
  };
  for (std::uint32_t v = 0; v < g.size() && ok; ++v) dfs(dfs, v);
  return ok;
}

struct CityMap {
  bsdloc::MapData map;
  std::shared_ptr<const bsdloc::LocationGraph> graph;
};

inline CityMap make_city(const bsdloc::SyntheticCityParams& p, double spacing = 10.0) {
  CityMap c;
  c.map = bsdloc::map_from_synthetic(bsdloc::generate_synthetic_city(p), spacing);
  auto bsd = bsdloc::compute_bsd_table(c.map, bsdloc::SectorSpec{});
  c.graph = std::make_shared<const bsdloc::LocationGraph>(
      bsdloc::make_location_graph(c.map.sampled, std::move(bsd)));
  return c;
}

/// Map used for the noisy-channel accuracy runs (about 2 400 places).
inline bsdloc::SyntheticCityParams accuracy_city() {
  bsdloc::SyntheticCityParams p;
  p.rows = 9;
  p.cols = 9;
  p.seed = 1;
  p.block_size = 200.0;
  p.line_jitter = 0.2;
  p.street_drop = 0.15;
  p.lot_min = 8.0;
  p.lot_max = 18.0;
  p.gap_frequency = 0.4;
  p.building_coverage = 0.7;
  p.gap_min_width = 5.0;
  p.gap_max_width = 12.0;
  return p;
}

/// Base parameters for the noiseless-localization map search.
inline bsdloc::SyntheticCityParams unique_city(std::uint64_t seed) {
  bsdloc::SyntheticCityParams p;
  p.rows = 6;
  p.cols = 6;
  p.seed = seed;
  p.line_jitter = 0.15;
  p.street_drop = 0.1;
  return p;
}

}  // namespace oracle
