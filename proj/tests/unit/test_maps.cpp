#include <gtest/gtest.h>

#include <bsdloc/map_data.hpp>
#include <bsdloc/osm.hpp>
#include <bsdloc/synthetic_city.hpp>

#include <map>
#include <sstream>

using namespace bsdloc;

namespace {

NodePolyline line(std::vector<std::int64_t> ids, std::vector<GeoPoint> pts) { return {std::move(ids), std::move(pts)}; }

}  // namespace

TEST(RoadGraph, MergesSharedNodesAndCountsDegrees) {
  const auto g = build_road_graph({line({1, 2, 3}, {{0, 0}, {50, 0}, {100, 0}}),
                                   line({2, 4}, {{50, 0}, {50, 50}}), line({5, 5}, {{9, 9}, {9, 9}})});
  EXPECT_EQ(g.node_count(), 5u);
  EXPECT_EQ(g.edge_count(), 3u);
  ASSERT_EQ(g.junction_nodes().size(), 1u);
  EXPECT_EQ(g.junction_points()[0], (GeoPoint{50, 0}));
}

TEST(Resample, StraightRoadAtArcLengthMultiples) {
  const auto g = build_road_graph({line({1, 2}, {{0, 0}, {35, 0}})});
  const auto s = resample_locations(g, 10.0);
  std::vector<double> xs;
  for (const auto& p : s.places) xs.push_back(p.position.x);
  std::sort(xs.begin(), xs.end());
  ASSERT_EQ(xs.size(), 5u);
  EXPECT_DOUBLE_EQ(xs[0], 0.0);
  EXPECT_DOUBLE_EQ(xs[1], 10.0);
  EXPECT_DOUBLE_EQ(xs[2], 20.0);
  EXPECT_DOUBLE_EQ(xs[3], 30.0);
  EXPECT_DOUBLE_EQ(xs[4], 35.0);
  EXPECT_EQ(s.place_edges.size(), 4u);
  // two arrivals at each interior place, one arrival plus one departure at each dead end
  EXPECT_EQ(s.locations.size(), 10u);
  for (std::size_t i = 0; i < s.locations.size(); ++i) EXPECT_EQ(s.locations[i].id, i);
}

TEST(Resample, HeadingsFollowTravelDirection) {
  const auto g = build_road_graph({line({1, 2}, {{0, 0}, {0, 20}})});
  const auto s = resample_locations(g, 10.0);
  for (const auto& l : s.locations) {
    if (l.from_place == kNoPlace) continue;
    const auto& from = s.places[l.from_place].position;
    const auto& at = s.places[l.place].position;
    EXPECT_NEAR(smallest_angle_deg(l.heading, bearing_deg(from, at)), 0.0, 1e-9);
  }
}

TEST(Resample, JunctionGetsOneArrivalPerNeighbour) {
  const auto g = build_road_graph({line({1, 2, 3}, {{-30, 0}, {0, 0}, {30, 0}}),
                                   line({2, 4}, {{0, 0}, {0, 30}}), line({2, 5}, {{0, 0}, {0, -30}})});
  const auto s = resample_locations(g, 10.0);
  PlaceId junction = kNoPlace;
  for (const auto& p : s.places) {
    if (p.position == GeoPoint{0, 0}) junction = p.id;
  }
  ASSERT_NE(junction, kNoPlace);
  std::size_t arrivals = 0;
  for (const auto& l : s.locations) arrivals += l.place == junction;
  EXPECT_EQ(arrivals, 4u);
}

TEST(Resample, RejectsBadSpacing) {
  const auto g = build_road_graph({line({1, 2}, {{0, 0}, {35, 0}})});
  EXPECT_THROW(resample_locations(g, 0.0), std::invalid_argument);
  EXPECT_THROW(resample_locations(g, -1.0), std::invalid_argument);
}

TEST(Osm, ParsesRoadsAndBuildings) {
  std::istringstream xml(R"(<?xml version="1.0"?>
<osm version="0.6">
  <node id="1" lat="51.5000" lon="-0.1200"/>
  <node id="2" lat="51.5000" lon="-0.1190"/>
  <node id="3" lat="51.5005" lon="-0.1190"/>
  <node id="10" lat="51.5001" lon="-0.1198"/>
  <node id="11" lat="51.5001" lon="-0.1196"/>
  <node id="12" lat="51.5002" lon="-0.1196"/>
  <way id="100"><nd ref="1"/><nd ref="2"/><nd ref="3"/><tag k="highway" v="residential"/></way>
  <way id="101"><nd ref="1"/><nd ref="3"/><tag k="highway" v="footway"/></way>
  <way id="102"><nd ref="1"/><nd ref="99"/><tag k="highway" v="primary"/></way>
  <way id="103"><nd ref="10"/><nd ref="11"/><nd ref="12"/><nd ref="10"/><tag k="building" v="yes"/></way>
  <way id="104"><nd ref="10"/><nd ref="11"/><tag k="building" v="yes"/></way>
</osm>)");
  const auto e = parse_osm(xml);
  EXPECT_EQ(e.report.nodes_read, 6u);
  EXPECT_EQ(e.report.ways_read, 5u);
  EXPECT_EQ(e.report.filtered_highways, 1u);
  EXPECT_EQ(e.report.ways_missing_nodes, 1u);
  EXPECT_EQ(e.report.unclosed_buildings, 1u);
  ASSERT_EQ(e.roads.size(), 1u);
  EXPECT_EQ(e.roads[0].ids, (std::vector<std::int64_t>{1, 2, 3}));
  ASSERT_EQ(e.buildings.size(), 1u);
  EXPECT_EQ(e.buildings[0].size(), 3u);
  const double dx = e.roads[0].points[1].x - e.roads[0].points[0].x;
  EXPECT_NEAR(dx, 6371000.0 * std::cos(e.origin.lat * 3.14159265358979323846 / 180.0) * 0.001 *
                      3.14159265358979323846 / 180.0,
              1e-6);
}

TEST(Osm, MalformedXmlReportsLine) {
  std::istringstream xml("<osm>\n<node id=\"1\" lat=\"0\" lon=\"0\">\n</osm>\n");
  try {
    parse_osm(xml);
    FAIL() << "expected OsmParseError";
  } catch (const OsmParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(MapJson, RoundTripPreservesEverything) {
  SyntheticCityParams p;
  p.rows = 3;
  p.cols = 3;
  p.line_jitter = 0.1;
  const MapData m = map_from_synthetic(generate_synthetic_city(p), 10.0);
  std::stringstream ss;
  save_map_json(ss, m);
  const MapData back = load_map_json(ss);
  EXPECT_EQ(back.sampled, m.sampled);
  EXPECT_EQ(back.semantic.buildings(), m.semantic.buildings());
  EXPECT_EQ(back.semantic.junctions(), m.semantic.junctions());
  EXPECT_EQ(back.spacing, m.spacing);
  EXPECT_EQ(compute_bsd_table(back, {}), compute_bsd_table(m, {}));
}

TEST(MapJson, VersionMismatchAndGarbage) {
  std::istringstream wrong(R"({"version": 99})");
  try {
    load_map_json(wrong);
    FAIL() << "expected MapVersionError";
  } catch (const MapVersionError& e) {
    EXPECT_EQ(e.expected(), kMapFormatVersion);
    EXPECT_EQ(e.found(), 99);
  }
  std::istringstream junk("{not json");
  EXPECT_THROW(load_map_json(junk), MapFormatError);
  std::istringstream missing(R"({"version": 1})");
  EXPECT_THROW(load_map_json(missing), MapFormatError);
}

TEST(MapData, FingerprintTracksDescriptors) {
  SyntheticCityParams p;
  p.rows = 3;
  p.cols = 3;
  const MapData m = map_from_synthetic(generate_synthetic_city(p), 10.0);
  auto bsd = compute_bsd_table(m, {});
  const auto h = map_fingerprint(m.sampled, bsd);
  EXPECT_EQ(h, map_fingerprint(m.sampled, bsd));
  bsd[0] = Bsd(static_cast<std::uint8_t>(bsd[0].bits() ^ 1));
  EXPECT_NE(h, map_fingerprint(m.sampled, bsd));
}

TEST(SyntheticCity, FiveByFiveGridHasTwentyOneJunctions) {
  SyntheticCityParams p;
  const auto c = generate_synthetic_city(p);
  EXPECT_EQ(c.graph.junction_nodes().size(), 21u);
  EXPECT_FALSE(c.map.buildings().empty());
}

TEST(SyntheticCity, DeterministicPerSeed) {
  SyntheticCityParams p;
  p.line_jitter = 0.2;
  p.street_drop = 0.2;
  const auto a = generate_synthetic_city(p);
  const auto b = generate_synthetic_city(p);
  EXPECT_EQ(a.map.buildings(), b.map.buildings());
  EXPECT_EQ(a.graph.positions, b.graph.positions);
  p.seed = 2;
  EXPECT_NE(generate_synthetic_city(p).map.buildings(), a.map.buildings());
}

TEST(SyntheticCity, StreetDropKeepsNetworkConnected) {
  SyntheticCityParams p;
  p.rows = 6;
  p.cols = 6;
  p.street_drop = 0.3;
  const auto c = generate_synthetic_city(p);
  std::vector<bool> seen(c.graph.node_count(), false);
  std::vector<std::uint32_t> stack = {0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    for (auto m : c.graph.neighbours[n]) {
      if (!seen[m]) {
        seen[m] = true;
        ++count;
        stack.push_back(m);
      }
    }
  }
  EXPECT_EQ(count, c.graph.node_count());
  EXPECT_LT(c.graph.edge_count(), 60u);
}

TEST(SyntheticCity, ValidateRejectsBadParams) {
  SyntheticCityParams p;
  p.rows = 1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.building_coverage = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.line_jitter = 0.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(SyntheticCity, GridProducesVariedDescriptors) {
  SyntheticCityParams p;
  p.rows = 6;
  p.cols = 6;
  const MapData m = map_from_synthetic(generate_synthetic_city(p), 10.0);
  std::map<std::uint8_t, int> hist;
  for (auto b : compute_bsd_table(m, {})) ++hist[b.bits()];
  EXPECT_GT(hist.size(), 8u);
}
