#pragma once

#include <cstdint>
#include <vector>

#include "bsdloc/geo.hpp"
#include "bsdloc/semantic_map.hpp"

namespace bsdloc {

/// Road way as a sequence of externally identified nodes.
struct NodePolyline {
  std::vector<std::int64_t> ids;
  std::vector<GeoPoint> points;
};

/// Undirected road graph with nodes merged by external id.
struct RoadGraph {
  std::vector<std::int64_t> node_ids;
  std::vector<GeoPoint> positions;
  /// Input ways as node-index sequences (consecutive duplicates removed).
  std::vector<std::vector<std::uint32_t>> ways;
  /// Sorted neighbour lists; degree = neighbours[i].size().
  std::vector<std::vector<std::uint32_t>> neighbours;

  std::size_t node_count() const { return positions.size(); }
  std::size_t degree(std::uint32_t n) const { return neighbours[n].size(); }
  std::size_t edge_count() const;
  /// Nodes of degree >= 3, ascending.
  std::vector<std::uint32_t> junction_nodes() const;
  std::vector<GeoPoint> junction_points() const;
};

/// Merges shared nodes by id, drops zero-length edges and computes degrees.
RoadGraph build_road_graph(const std::vector<NodePolyline>& roads);

/// A road sample point. `node` is the road-graph node it sits on, or -1.
struct Place {
  PlaceId id = 0;
  GeoPoint position;
  std::int64_t node = -1;

  friend bool operator==(const Place&, const Place&) = default;
};

/// Places sampled along the road network plus the directed locations built on them.
///
/// Every place edge joins consecutive samples of one chain (a maximal run of
/// road between graph nodes of degree != 2). Each directed location is an
/// arrival at a place from one of its neighbours, with the chain tangent as
/// heading; dead-end places additionally get one outward-facing location.
struct SampledRoads {
  std::vector<Place> places;
  /// Undirected, each pair stored once with first < second, sorted.
  std::vector<std::pair<PlaceId, PlaceId>> place_edges;
  std::vector<DirectedLocation> locations;

  friend bool operator==(const SampledRoads&, const SampledRoads&) = default;
};

/// Samples every chain at arc-length multiples of `spacing`, always including
/// both chain endpoints. Throws std::invalid_argument if spacing <= 0.
SampledRoads resample_locations(const RoadGraph& graph, double spacing = 10.0);

}  // namespace bsdloc
