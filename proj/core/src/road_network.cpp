#include "bsdloc/road_network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace bsdloc {

std::size_t RoadGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : neighbours) twice += n.size();
  return twice / 2;
}

std::vector<std::uint32_t> RoadGraph::junction_nodes() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < neighbours.size(); ++i) {
    if (neighbours[i].size() >= 3) out.push_back(i);
  }
  return out;
}

std::vector<GeoPoint> RoadGraph::junction_points() const {
  std::vector<GeoPoint> out;
  for (auto n : junction_nodes()) out.push_back(positions[n]);
  return out;
}

RoadGraph build_road_graph(const std::vector<NodePolyline>& roads) {
  RoadGraph g;
  std::unordered_map<std::int64_t, std::uint32_t> index;
  for (const auto& road : roads) {
    if (road.ids.size() != road.points.size()) {
      throw std::invalid_argument("build_road_graph: ids and points differ in length");
    }
    std::vector<std::uint32_t> way;
    for (std::size_t k = 0; k < road.ids.size(); ++k) {
      auto [it, inserted] = index.try_emplace(road.ids[k], static_cast<std::uint32_t>(g.positions.size()));
      if (inserted) {
        g.node_ids.push_back(road.ids[k]);
        g.positions.push_back(road.points[k]);
        g.neighbours.emplace_back();
      }
      if (way.empty() || way.back() != it->second) way.push_back(it->second);
    }
    for (std::size_t k = 0; k + 1 < way.size(); ++k) {
      const auto a = way[k];
      const auto b = way[k + 1];
      if (distance(g.positions[a], g.positions[b]) <= 1e-9) continue;
      g.neighbours[a].push_back(b);
      g.neighbours[b].push_back(a);
    }
    g.ways.push_back(std::move(way));
  }
  for (auto& n : g.neighbours) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return g;
}

namespace {

struct Chain {
  std::vector<std::uint32_t> nodes;
};

std::vector<Chain> extract_chains(const RoadGraph& g) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> used;
  auto edge_key = [](std::uint32_t a, std::uint32_t b) {
    return std::make_pair(std::min(a, b), std::max(a, b));
  };
  auto is_key = [&](std::uint32_t n) { return g.degree(n) != 2; };
  std::vector<Chain> chains;

  auto walk = [&](std::uint32_t start, std::uint32_t first, bool stop_at_start) {
    Chain c;
    c.nodes = {start, first};
    used.insert(edge_key(start, first));
    std::uint32_t prev = start;
    std::uint32_t cur = first;
    while (!is_key(cur) && !(stop_at_start && cur == start)) {
      const auto& nb = g.neighbours[cur];
      const std::uint32_t next = nb[0] == prev ? nb[1] : nb[0];
      if (used.count(edge_key(cur, next)) != 0) break;
      used.insert(edge_key(cur, next));
      c.nodes.push_back(next);
      prev = cur;
      cur = next;
    }
    chains.push_back(std::move(c));
  };

  for (std::uint32_t n = 0; n < g.node_count(); ++n) {
    if (!is_key(n)) continue;
    for (auto nb : g.neighbours[n]) {
      if (used.count(edge_key(n, nb)) == 0) walk(n, nb, false);
    }
  }
  // isolated cycles made only of degree-2 nodes
  for (std::uint32_t n = 0; n < g.node_count(); ++n) {
    for (auto nb : g.neighbours[n]) {
      if (used.count(edge_key(n, nb)) == 0) walk(n, nb, true);
    }
  }
  return chains;
}

}  // namespace

SampledRoads resample_locations(const RoadGraph& graph, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw std::invalid_argument("resample_locations: spacing must be positive");
  }
  SampledRoads out;
  std::unordered_map<std::uint32_t, PlaceId> node_place;
  std::set<std::pair<PlaceId, PlaceId>> edges;
  std::set<std::pair<PlaceId, PlaceId>> arrivals;
  std::vector<DirectedLocation> departures;

  auto place_for_node = [&](std::uint32_t n) {
    auto [it, inserted] = node_place.try_emplace(n, static_cast<PlaceId>(out.places.size()));
    if (inserted) out.places.push_back({it->second, graph.positions[n], static_cast<std::int64_t>(n)});
    return it->second;
  };
  auto add_arrival = [&](PlaceId place, PlaceId from, double heading) {
    if (!arrivals.insert({place, from}).second) return;
    out.locations.push_back(
        {0, place, out.places[place].position, normalize_deg(heading), from});
  };

  for (const auto& chain : extract_chains(graph)) {
    std::vector<GeoPoint> pts;
    for (auto n : chain.nodes) pts.push_back(graph.positions[n]);
    std::vector<double> cum(pts.size(), 0.0);
    for (std::size_t k = 1; k < pts.size(); ++k) cum[k] = cum[k - 1] + distance(pts[k - 1], pts[k]);
    const double total = cum.back();

    std::vector<double> stations;
    const auto n_full = static_cast<long>(std::floor(total / spacing + 1e-9));
    for (long k = 0; k <= n_full; ++k) stations.push_back(static_cast<double>(k) * spacing);
    if (total - stations.back() > 1e-6 || stations.size() == 1) {
      stations.push_back(total);
    } else {
      stations.back() = total;
    }

    const std::uint32_t start_node = chain.nodes.front();
    const std::uint32_t end_node = chain.nodes.back();
    const std::size_t interior = stations.size() - 2;
    const PlaceId start_place = place_for_node(start_node);
    const PlaceId end_place = place_for_node(end_node);
    if (interior == 0 && (start_place == end_place ||
                          edges.count({std::min(start_place, end_place),
                                       std::max(start_place, end_place)}) != 0)) {
      continue;
    }

    // tangent of the segment containing arc length s (last segment at the end)
    auto tangent = [&](double s) {
      std::size_t seg = 0;
      while (seg + 2 < pts.size() && cum[seg + 1] <= s) ++seg;
      return bearing_deg(pts[seg], pts[seg + 1]);
    };
    auto position_at = [&](double s) {
      std::size_t seg = 0;
      while (seg + 2 < pts.size() && cum[seg + 1] <= s) ++seg;
      const double len = cum[seg + 1] - cum[seg];
      const double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
      return GeoPoint{pts[seg].x + t * (pts[seg + 1].x - pts[seg].x),
                      pts[seg].y + t * (pts[seg + 1].y - pts[seg].y)};
    };

    std::vector<PlaceId> ids;
    ids.push_back(start_place);
    for (std::size_t k = 1; k + 1 < stations.size(); ++k) {
      const auto id = static_cast<PlaceId>(out.places.size());
      out.places.push_back({id, position_at(stations[k]), -1});
      ids.push_back(id);
    }
    ids.push_back(end_place);

    for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
      edges.insert({std::min(ids[k], ids[k + 1]), std::max(ids[k], ids[k + 1])});
    }
    const double end_tangent = bearing_deg(pts[pts.size() - 2], pts.back());
    for (std::size_t k = 1; k < ids.size(); ++k) {
      const double h = k + 1 == ids.size() ? end_tangent : tangent(stations[k]);
      add_arrival(ids[k], ids[k - 1], h);
    }
    for (std::size_t k = ids.size() - 1; k-- > 0;) {
      add_arrival(ids[k], ids[k + 1], tangent(stations[k]) + 180.0);
    }
    if (graph.degree(start_node) == 1) {
      departures.push_back({0, start_place, out.places[start_place].position,
                            normalize_deg(tangent(0.0)), kNoPlace});
    }
    if (graph.degree(end_node) == 1 && end_node != start_node) {
      departures.push_back({0, end_place, out.places[end_place].position,
                            normalize_deg(end_tangent + 180.0), kNoPlace});
    }
  }
  out.locations.insert(out.locations.end(), departures.begin(), departures.end());
  for (std::size_t i = 0; i < out.locations.size(); ++i) {
    out.locations[i].id = static_cast<LocationId>(i);
  }
  out.place_edges.assign(edges.begin(), edges.end());
  return out;
}

}  // namespace bsdloc
