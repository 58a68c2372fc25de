#include "bsdloc/map_data.hpp"

#include <cstring>
#include <json.hpp>

namespace bsdloc {

using nlohmann::json;

MapData assemble_map(RoadGraph graph, std::vector<Polygon> buildings, LatLon origin,
                     double spacing) {
  std::vector<Polyline> lines;
  for (const auto& way : graph.ways) {
    Polyline pl;
    for (auto n : way) pl.push_back(graph.positions[n]);
    lines.push_back(std::move(pl));
  }
  MapData m;
  m.origin = origin;
  m.spacing = spacing;
  m.semantic = SemanticMap(graph.junction_points(), std::move(buildings), std::move(lines));
  m.sampled = resample_locations(graph, spacing);
  m.graph = std::move(graph);
  return m;
}

MapData map_from_osm(const OsmExtract& extract, double spacing) {
  RoadGraph g = extract.roads.empty() ? RoadGraph{} : build_road_graph(extract.roads);
  return assemble_map(std::move(g), extract.buildings, extract.origin, spacing);
}

MapData map_from_synthetic(const SyntheticCity& city, double spacing) {
  return assemble_map(city.graph, city.map.buildings(), LatLon{}, spacing);
}

std::vector<Bsd> compute_bsd_table(const MapData& map, const SectorSpec& spec) {
  spec.validate();
  std::vector<Bsd> table;
  table.reserve(map.sampled.locations.size());
  for (const auto& loc : map.sampled.locations) {
    table.push_back(ground_truth_bsd(loc, map.semantic, spec));
  }
  return table;
}

void save_map_json(std::ostream& out, const MapData& map) {
  json j;
  j["version"] = kMapFormatVersion;
  j["origin"] = {{"lat", map.origin.lat}, {"lon", map.origin.lon}};
  j["spacing"] = map.spacing;
  json points = json::object();
  for (std::size_t i = 0; i < map.graph.node_count(); ++i) {
    points[std::to_string(map.graph.node_ids[i])] = {map.graph.positions[i].x,
                                                     map.graph.positions[i].y};
  }
  j["points"] = std::move(points);
  json roads = json::array();
  for (const auto& way : map.graph.ways) {
    json ids = json::array();
    for (auto n : way) ids.push_back(map.graph.node_ids[n]);
    roads.push_back(std::move(ids));
  }
  j["roads"] = std::move(roads);
  json buildings = json::array();
  for (const auto& ring : map.semantic.buildings()) {
    json r = json::array();
    for (const auto& p : ring) r.push_back({p.x, p.y});
    buildings.push_back(std::move(r));
  }
  j["buildings"] = std::move(buildings);
  json places = json::array();
  for (const auto& p : map.sampled.places) places.push_back({p.position.x, p.position.y, p.node});
  j["places"] = std::move(places);
  json edges = json::array();
  for (const auto& [a, b] : map.sampled.place_edges) edges.push_back({a, b});
  j["place_edges"] = std::move(edges);
  json locs = json::array();
  for (const auto& l : map.sampled.locations) {
    json o = {{"id", l.id},
              {"place", l.place},
              {"x", l.position.x},
              {"y", l.position.y},
              {"heading", l.heading}};
    o["from"] = l.from_place == kNoPlace ? json(nullptr) : json(l.from_place);
    locs.push_back(std::move(o));
  }
  j["locations"] = std::move(locs);
  out << j.dump() << '\n';
}

MapData load_map_json(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw MapFormatError(std::string("map json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version") || !j["version"].is_number_integer()) {
    throw MapFormatError("map json: missing integer version field");
  }
  const int version = j["version"].get<int>();
  if (version != kMapFormatVersion) throw MapVersionError(kMapFormatVersion, version);
  try {
    LatLon origin{j.at("origin").at("lat").get<double>(), j.at("origin").at("lon").get<double>()};
    const double spacing = j.at("spacing").get<double>();
    const json& points = j.at("points");
    std::vector<NodePolyline> roads;
    for (const auto& way : j.at("roads")) {
      NodePolyline pl;
      for (const auto& id : way) {
        const auto nid = id.get<std::int64_t>();
        const json& xy = points.at(std::to_string(nid));
        pl.ids.push_back(nid);
        pl.points.push_back({xy.at(0).get<double>(), xy.at(1).get<double>()});
      }
      roads.push_back(std::move(pl));
    }
    std::vector<Polygon> buildings;
    for (const auto& ring : j.at("buildings")) {
      Polygon r;
      for (const auto& p : ring) r.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      buildings.push_back(std::move(r));
    }
    MapData m;
    m.origin = origin;
    m.spacing = spacing;
    m.graph = roads.empty() ? RoadGraph{} : build_road_graph(roads);
    std::vector<Polyline> lines;
    for (const auto& way : m.graph.ways) {
      Polyline pl;
      for (auto n : way) pl.push_back(m.graph.positions[n]);
      lines.push_back(std::move(pl));
    }
    m.semantic = SemanticMap(m.graph.junction_points(), std::move(buildings), std::move(lines));
    for (const auto& p : j.at("places")) {
      m.sampled.places.push_back({static_cast<PlaceId>(m.sampled.places.size()),
                                  {p.at(0).get<double>(), p.at(1).get<double>()},
                                  p.at(2).get<std::int64_t>()});
    }
    for (const auto& e : j.at("place_edges")) {
      m.sampled.place_edges.emplace_back(e.at(0).get<PlaceId>(), e.at(1).get<PlaceId>());
    }
    for (const auto& l : j.at("locations")) {
      DirectedLocation d;
      d.id = l.at("id").get<LocationId>();
      d.place = l.at("place").get<PlaceId>();
      d.position = {l.at("x").get<double>(), l.at("y").get<double>()};
      d.heading = l.at("heading").get<double>();
      d.from_place = l.at("from").is_null() ? kNoPlace : l.at("from").get<PlaceId>();
      if (d.id != m.sampled.locations.size() || d.place >= m.sampled.places.size()) {
        throw MapFormatError("map json: location ids must be dense and reference known places");
      }
      m.sampled.locations.push_back(d);
    }
    return m;
  } catch (const json::exception& e) {
    throw MapFormatError(std::string("map json: ") + e.what());
  }
}

std::uint64_t map_fingerprint(const SampledRoads& sampled, const std::vector<Bsd>& bsd) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& l : sampled.locations) {
    mix(&l.place, sizeof l.place);
    mix(&l.from_place, sizeof l.from_place);
    mix(&l.heading, sizeof l.heading);
  }
  for (const auto& [a, b] : sampled.place_edges) {
    mix(&a, sizeof a);
    mix(&b, sizeof b);
  }
  for (const auto& d : bsd) {
    const std::uint8_t b = d.bits();
    mix(&b, 1);
  }
  return h;
}

}  // namespace bsdloc
