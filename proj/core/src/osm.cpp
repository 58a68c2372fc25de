#include "bsdloc/osm.hpp"

#include <expat.h>

#include <cstdlib>
#include <cstring>
#include <memory>
#include <unordered_map>
#include <unordered_set>

namespace bsdloc {

namespace {

struct RawWay {
  std::int64_t id = 0;
  std::vector<std::int64_t> refs;
  std::string highway;
  std::string building;
};

struct ParseState {
  std::unordered_map<std::int64_t, LatLon> nodes;
  std::vector<RawWay> ways;
  RawWay current;
  bool in_way = false;
  std::string error;
  std::size_t error_line = 0;
  XML_Parser parser = nullptr;
};

const char* attr(const XML_Char** atts, const char* name) {
  for (int i = 0; atts[i] != nullptr; i += 2) {
    if (std::strcmp(atts[i], name) == 0) return atts[i + 1];
  }
  return nullptr;
}

void fail(ParseState& st, const std::string& msg) {
  if (st.error.empty()) {
    st.error = msg;
    st.error_line = XML_GetCurrentLineNumber(st.parser);
  }
  XML_StopParser(st.parser, XML_FALSE);
}

bool parse_number(const char* s, double& out) {
  if (s == nullptr) return false;
  char* end = nullptr;
  out = std::strtod(s, &end);
  return end != s && *end == '\0';
}

bool parse_id(const char* s, std::int64_t& out) {
  if (s == nullptr) return false;
  char* end = nullptr;
  out = std::strtoll(s, &end, 10);
  return end != s && *end == '\0';
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** atts) {
  auto& st = *static_cast<ParseState*>(data);
  if (std::strcmp(name, "node") == 0) {
    std::int64_t id = 0;
    double lat = 0.0;
    double lon = 0.0;
    if (!parse_id(attr(atts, "id"), id) || !parse_number(attr(atts, "lat"), lat) ||
        !parse_number(attr(atts, "lon"), lon)) {
      fail(st, "node without valid id/lat/lon");
      return;
    }
    st.nodes[id] = {lat, lon};
  } else if (std::strcmp(name, "way") == 0) {
    st.current = RawWay{};
    if (!parse_id(attr(atts, "id"), st.current.id)) {
      fail(st, "way without valid id");
      return;
    }
    st.in_way = true;
  } else if (std::strcmp(name, "nd") == 0 && st.in_way) {
    std::int64_t ref = 0;
    if (!parse_id(attr(atts, "ref"), ref)) {
      fail(st, "nd without valid ref");
      return;
    }
    st.current.refs.push_back(ref);
  } else if (std::strcmp(name, "tag") == 0 && st.in_way) {
    const char* k = attr(atts, "k");
    const char* v = attr(atts, "v");
    if (k == nullptr || v == nullptr) return;
    if (std::strcmp(k, "highway") == 0) st.current.highway = v;
    if (std::strcmp(k, "building") == 0) st.current.building = v;
  }
}

void XMLCALL on_end(void* data, const XML_Char* name) {
  auto& st = *static_cast<ParseState*>(data);
  if (std::strcmp(name, "way") == 0 && st.in_way) {
    st.ways.push_back(std::move(st.current));
    st.in_way = false;
  }
}

}  // namespace

OsmExtract parse_osm(std::istream& xml, const OsmOptions& options) {
  ParseState st;
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate(nullptr), &XML_ParserFree);
  st.parser = parser.get();
  XML_SetUserData(st.parser, &st);
  XML_SetElementHandler(st.parser, on_start, on_end);

  std::vector<char> buf(1 << 16);
  while (true) {
    xml.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<int>(xml.gcount());
    const bool last = got == 0 || xml.eof();
    if (XML_Parse(st.parser, buf.data(), got, last ? XML_TRUE : XML_FALSE) == XML_STATUS_ERROR) {
      if (!st.error.empty()) throw OsmParseError(st.error, st.error_line);
      throw OsmParseError(XML_ErrorString(XML_GetErrorCode(st.parser)),
                          XML_GetCurrentLineNumber(st.parser));
    }
    if (last) break;
  }

  OsmExtract out;
  out.report.nodes_read = st.nodes.size();
  out.report.ways_read = st.ways.size();

  std::vector<const RawWay*> roads;
  std::vector<const RawWay*> buildings;
  for (const auto& w : st.ways) {
    bool complete = true;
    for (auto r : w.refs) {
      if (st.nodes.count(r) == 0) {
        complete = false;
        break;
      }
    }
    const bool is_road = !w.highway.empty();
    const bool is_building = !w.building.empty() && w.building != "no";
    if (!is_road && !is_building) continue;
    if (!complete) {
      ++out.report.ways_missing_nodes;
      continue;
    }
    if (is_road) {
      if (options.highway_allowlist.count(w.highway) == 0) {
        ++out.report.filtered_highways;
      } else if (w.refs.size() >= 2) {
        roads.push_back(&w);
      }
    } else {
      if (w.refs.size() >= 4 && w.refs.front() == w.refs.back()) {
        buildings.push_back(&w);
      } else {
        ++out.report.unclosed_buildings;
      }
    }
  }

  // origin = centroid of the nodes that survive
  std::unordered_set<std::int64_t> used;
  double lat_sum = 0.0;
  double lon_sum = 0.0;
  auto account = [&](const RawWay* w) {
    for (auto r : w->refs) {
      if (used.insert(r).second) {
        lat_sum += st.nodes[r].lat;
        lon_sum += st.nodes[r].lon;
      }
    }
  };
  for (auto* w : roads) account(w);
  for (auto* w : buildings) account(w);
  if (!used.empty()) {
    out.origin = {lat_sum / static_cast<double>(used.size()),
                  lon_sum / static_cast<double>(used.size())};
  }
  auto project = [&](std::int64_t r) {
    const LatLon& ll = st.nodes[r];
    return project_to_local(ll.lat, ll.lon, out.origin);
  };
  for (auto* w : roads) {
    NodePolyline pl;
    for (auto r : w->refs) {
      pl.ids.push_back(r);
      pl.points.push_back(project(r));
    }
    out.roads.push_back(std::move(pl));
  }
  for (auto* w : buildings) {
    Polygon ring;
    for (std::size_t k = 0; k + 1 < w->refs.size(); ++k) ring.push_back(project(w->refs[k]));
    out.buildings.push_back(std::move(ring));
  }
  return out;
}

}  // namespace bsdloc
