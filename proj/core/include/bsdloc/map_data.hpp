#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsdloc/bsd.hpp"
#include "bsdloc/osm.hpp"
#include "bsdloc/road_network.hpp"
#include "bsdloc/semantic_map.hpp"
#include "bsdloc/synthetic_city.hpp"

namespace bsdloc {

inline constexpr int kMapFormatVersion = 1;

/// Everything derived from one vector map: features, road graph and the
/// sampled places and directed locations.
struct MapData {
  LatLon origin;
  double spacing = 10.0;
  SemanticMap semantic;
  RoadGraph graph;
  SampledRoads sampled;
};

/// Junctions come from the graph (degree >= 3), road centerlines from its ways.
MapData assemble_map(RoadGraph graph, std::vector<Polygon> buildings, LatLon origin,
                     double spacing);
MapData map_from_osm(const OsmExtract& extract, double spacing);
MapData map_from_synthetic(const SyntheticCity& city, double spacing);

/// Ground-truth descriptor of every directed location, indexed by location id.
std::vector<Bsd> compute_bsd_table(const MapData& map, const SectorSpec& spec);

class MapFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when the file's version field differs from kMapFormatVersion.
class MapVersionError : public MapFormatError {
 public:
  MapVersionError(int expected, int found)
      : MapFormatError("map json version mismatch: expected " + std::to_string(expected) +
                       ", found " + std::to_string(found)),
        expected_(expected),
        found_(found) {}
  int expected() const { return expected_; }
  int found() const { return found_; }

 private:
  int expected_;
  int found_;
};

void save_map_json(std::ostream& out, const MapData& map);
MapData load_map_json(std::istream& in);

/// FNV-1a over the sampled network and descriptor table; identifies the map a
/// route database was built from.
std::uint64_t map_fingerprint(const SampledRoads& sampled, const std::vector<Bsd>& bsd);

}  // namespace bsdloc
