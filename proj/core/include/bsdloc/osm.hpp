#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsdloc/geo.hpp"
#include "bsdloc/road_network.hpp"
#include "bsdloc/semantic_map.hpp"

namespace bsdloc {

class OsmParseError : public std::runtime_error {
 public:
  OsmParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " at line " + std::to_string(line)), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct OsmOptions {
  /// highway=* values that become roads.
  std::set<std::string> highway_allowlist = {
      "motorway",      "trunk",          "primary",        "secondary",
      "tertiary",      "unclassified",   "residential",    "motorway_link",
      "trunk_link",    "primary_link",   "secondary_link", "tertiary_link",
      "living_street"};
};

struct OsmReport {
  std::size_t nodes_read = 0;
  std::size_t ways_read = 0;
  /// Ways dropped because a node ref was not defined in the extract.
  std::size_t ways_missing_nodes = 0;
  /// building=* ways that were not closed rings of >= 4 refs.
  std::size_t unclosed_buildings = 0;
  /// highway=* ways whose value is not in the allowlist.
  std::size_t filtered_highways = 0;
};

/// Roads and buildings extracted from an OSM-XML document, projected about the
/// centroid of the nodes they reference.
struct OsmExtract {
  LatLon origin;
  std::vector<NodePolyline> roads;
  std::vector<Polygon> buildings;
  OsmReport report;
};

/// Parses the node/way subset of OSM-XML. Throws OsmParseError (with line
/// number) on malformed XML.
OsmExtract parse_osm(std::istream& xml, const OsmOptions& options = {});

}  // namespace bsdloc
