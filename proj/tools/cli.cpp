#include "cli.hpp"

#include <CLI11.hpp>
#include <bsdloc/osm.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <memory>
#include <sstream>

namespace bsdloc::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ConfigError(std::string("unknown config key '") + k + "' in " + where);
  }
}

json synth_to_json(const SyntheticCityParams& p) {
  return {{"rows", p.rows},
          {"cols", p.cols},
          {"block_size", p.block_size},
          {"building_coverage", p.building_coverage},
          {"gap_frequency", p.gap_frequency},
          {"seed", p.seed},
          {"line_jitter", p.line_jitter},
          {"grid_snap", p.grid_snap},
          {"street_drop", p.street_drop},
          {"setback", p.setback},
          {"building_depth", p.building_depth},
          {"lot_min", p.lot_min},
          {"lot_max", p.lot_max},
          {"gap_min_width", p.gap_min_width},
          {"gap_max_width", p.gap_max_width}};
}

SyntheticCityParams synth_from_json(const json& j, std::uint64_t default_seed) {
  reject_unknown(j,
                 {"rows", "cols", "block_size", "building_coverage", "gap_frequency", "seed",
                  "line_jitter", "grid_snap", "street_drop", "setback", "building_depth", "lot_min",
                  "lot_max", "gap_min_width", "gap_max_width"},
                 "synth");
  SyntheticCityParams p;
  p.seed = default_seed;
  take(j, "rows", p.rows);
  take(j, "cols", p.cols);
  take(j, "block_size", p.block_size);
  take(j, "building_coverage", p.building_coverage);
  take(j, "gap_frequency", p.gap_frequency);
  take(j, "seed", p.seed);
  take(j, "line_jitter", p.line_jitter);
  take(j, "grid_snap", p.grid_snap);
  take(j, "street_drop", p.street_drop);
  take(j, "setback", p.setback);
  take(j, "building_depth", p.building_depth);
  take(j, "lot_min", p.lot_min);
  take(j, "lot_max", p.lot_max);
  take(j, "gap_min_width", p.gap_min_width);
  take(j, "gap_max_width", p.gap_max_width);
  return p;
}

json to_json(const ExperimentConfig& c) {
  json j = {{"map", c.map},
            {"osm", c.osm},
            {"db", c.db},
            {"spacing", c.spacing},
            {"sector",
             {{"radius", c.sector.radius},
              {"half_angle", c.sector.half_angle},
              {"ray_step", c.sector.ray_step},
              {"min_gap", c.sector.min_gap},
              {"junction_exclusion", c.sector.junction_exclusion}}},
            {"max_length", c.max_length},
            {"lengths", c.lengths},
            {"qs", c.qs},
            {"q", c.q},
            {"routes", c.routes},
            {"seed", c.seed},
            {"out", c.out},
            {"methods", c.methods},
            {"threads", c.threads},
            {"session",
             {{"overlap_threshold", c.session.overlap_threshold},
              {"streak", c.session.streak},
              {"mutual_overlap", c.session.mutual_overlap},
              {"mode", std::string(to_string(c.session.mode))}}}};
  j["synth"] = c.synth ? synth_to_json(*c.synth) : json(nullptr);
  return j;
}

struct Loaded {
  MapData map;
  std::shared_ptr<const LocationGraph> graph;
  std::unique_ptr<RouteDatabase> db;
  std::unique_ptr<RouteMatcher> matcher;
};

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const ExperimentConfig& c, const std::string& name,
                       std::ios::openmode mode = std::ios::out) {
  fs::create_directories(c.out);
  const std::string path = (fs::path(c.out) / name).string();
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

MapData load_map(const ExperimentConfig& c) {
  if (!c.map.empty()) {
    auto in = open_in(c.map);
    return load_map_json(in);
  }
  if (!c.osm.empty()) {
    auto in = open_in(c.osm);
    return map_from_osm(parse_osm(in), c.spacing);
  }
  if (c.synth) return map_from_synthetic(generate_synthetic_city(*c.synth), c.spacing);
  throw ConfigError("no map source: pass --map, --osm or a synth block in --config");
}

Loaded load_all(const ExperimentConfig& c, bool with_db = true) {
  Loaded l;
  l.map = load_map(c);
  auto bsd = compute_bsd_table(l.map, c.sector);
  l.graph = std::make_shared<const LocationGraph>(make_location_graph(l.map.sampled, std::move(bsd)));
  if (!with_db) return l;
  if (!c.db.empty()) {
    auto in = open_in(c.db, std::ios::binary);
    l.db = std::make_unique<RouteDatabase>(RouteDatabase::load(in, l.graph, c.max_length));
  } else {
    l.db = std::make_unique<RouteDatabase>(l.graph, c.max_length);
  }
  l.matcher = std::make_unique<RouteMatcher>(*l.db);
  return l;
}

std::vector<LocationId> parse_route(const std::string& text) {
  std::vector<LocationId> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      ids.push_back(static_cast<LocationId>(v));
    } catch (const std::logic_error&) {
      throw ConfigError("bad location id '" + item + "' in --route");
    }
  }
  if (ids.empty()) throw ConfigError("--route is empty");
  return ids;
}

void check_route(const LocationGraph& g, const std::vector<LocationId>& route) {
  for (std::size_t k = 0; k < route.size(); ++k) {
    if (route[k] >= g.size()) {
      throw ConfigError("--route location " + std::to_string(route[k]) + " does not exist");
    }
    if (k > 0 && !g.adjacency.adjacent(route[k - 1], route[k])) {
      throw ConfigError("--route locations " + std::to_string(route[k - 1]) + " and " +
                        std::to_string(route[k]) + " are not consecutive");
    }
  }
}

TestRoute pick_route(const Loaded& l, const ExperimentConfig& c, const std::string& route_text,
                     std::size_t route_index) {
  if (!route_text.empty()) {
    TestRoute r;
    r.locations = parse_route(route_text);
    check_route(*l.graph, r.locations);
    return r;
  }
  auto sampled = sample_test_routes(*l.db, c.max_length, route_index + 1, c.seed);
  return sampled.back();
}

std::vector<MatchMode> methods_of(const ExperimentConfig& c) {
  std::vector<MatchMode> m;
  for (const auto& s : c.methods) m.push_back(parse_match_mode(s));
  return m;
}

std::string hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void error_line(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(spacing > 0.0)) throw ConfigError("spacing must be positive");
  if (max_length == 0) throw ConfigError("max_length must be positive");
  if (routes == 0) throw ConfigError("routes must be positive");
  if (threads == 0) throw ConfigError("threads must be positive");
  for (auto l : lengths) {
    if (l == 0) throw ConfigError("lengths must be positive");
  }
  if (qs.empty()) throw ConfigError("qs must not be empty");
  for (double v : qs) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("q values must lie in [0, 1]");
  }
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("q must lie in [0, 1]");
  if (methods.empty()) throw ConfigError("methods must not be empty");
  try {
    for (const auto& m : methods) parse_match_mode(m);
    sector.validate();
    session.validate();
    if (synth) synth->validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void apply_config_json(ExperimentConfig& c, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    reject_unknown(j,
                   {"map", "osm", "synth", "db", "spacing", "sector", "max_length", "lengths", "qs",
                    "q", "routes", "seed", "out", "methods", "threads", "session"},
                   "config");
    take(j, "map", c.map);
    take(j, "osm", c.osm);
    take(j, "db", c.db);
    take(j, "spacing", c.spacing);
    take(j, "max_length", c.max_length);
    take(j, "lengths", c.lengths);
    take(j, "qs", c.qs);
    take(j, "q", c.q);
    take(j, "routes", c.routes);
    take(j, "seed", c.seed);
    take(j, "out", c.out);
    take(j, "methods", c.methods);
    take(j, "threads", c.threads);
    if (j.contains("sector")) {
      const json& s = j.at("sector");
      reject_unknown(s, {"radius", "half_angle", "ray_step", "min_gap", "junction_exclusion"},
                     "sector");
      take(s, "radius", c.sector.radius);
      take(s, "half_angle", c.sector.half_angle);
      take(s, "ray_step", c.sector.ray_step);
      take(s, "min_gap", c.sector.min_gap);
      take(s, "junction_exclusion", c.sector.junction_exclusion);
    }
    if (j.contains("session")) {
      const json& s = j.at("session");
      reject_unknown(s, {"overlap_threshold", "streak", "mutual_overlap", "mode"}, "session");
      take(s, "overlap_threshold", c.session.overlap_threshold);
      take(s, "streak", c.session.streak);
      take(s, "mutual_overlap", c.session.mutual_overlap);
      if (s.contains("mode")) c.session.mode = parse_match_mode(s.at("mode").get<std::string>());
    }
    if (j.contains("synth") && !j.at("synth").is_null()) {
      c.synth = synth_from_json(j.at("synth"), c.seed);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c;
  apply_config_json(c, ss.str());
  return c;
}

std::string canonical_config(const ExperimentConfig& config, const std::string& command) {
  json j = to_json(config);
  j["command"] = command;
  return j.dump();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Route localization from binary semantic descriptors"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir, map_path, osm_path, db_path, route_text;
  std::optional<double> spacing, q;
  std::optional<std::size_t> max_length, routes;
  std::optional<unsigned> threads;
  std::optional<std::string> mode;
  std::vector<double> qs;
  std::vector<std::size_t> lengths;
  std::vector<std::string> methods;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--map", map_path, "Map JSON");
  app.add_option("--osm", osm_path, "OSM-XML extract");
  app.add_option("--db", db_path, "Route database written by build-db");
  app.add_option("--spacing", spacing, "Sample spacing in meters");
  app.add_option("--max-length", max_length, "Longest route length M");
  app.add_option("--routes", routes, "Number of test routes");
  app.add_option("--q", q, "Detector accuracy");
  app.add_option("--qs", qs, "Detector accuracies to sweep")->delimiter(',');
  app.add_option("--lengths", lengths, "Route lengths for histograms")->delimiter(',');
  app.add_option("--methods", methods, "Matching methods")->delimiter(',');
  app.add_option("--threads", threads, "Worker threads");
  app.add_option("--mode", mode, "Matching method for a single session");

  app.add_subcommand("ingest", "Convert an OSM extract into map.json");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic city into map.json");
  SyntheticCityParams sp;
  synth->add_option("--rows", sp.rows);
  synth->add_option("--cols", sp.cols);
  synth->add_option("--block", sp.block_size);
  synth->add_option("--coverage", sp.building_coverage);
  synth->add_option("--gap-frequency", sp.gap_frequency);
  synth->add_option("--jitter", sp.line_jitter);
  synth->add_option("--drop", sp.street_drop);
  synth->add_option("--lot-min", sp.lot_min);
  synth->add_option("--lot-max", sp.lot_max);
  synth->add_option("--gap-min", sp.gap_min_width);
  synth->add_option("--gap-max", sp.gap_max_width);

  auto* bsd = app.add_subcommand("bsd", "Write the descriptor table as an estimates CSV");
  bool noisy = false;
  bsd->add_flag("--noisy", noisy, "Corrupt descriptors with the detector channel at --q");

  auto* build = app.add_subcommand("build-db", "Enumerate routes and write routes.db");
  std::optional<std::size_t> limit;
  build->add_option("--limit", limit, "Per-length route cap");

  auto* localize = app.add_subcommand("localize", "Run one session and write its step log");
  std::string estimates_path;
  std::size_t route_index = 0;
  localize->add_option("--estimates", estimates_path, "Per-location estimates CSV");
  localize->add_option("--route", route_text, "Comma-separated location ids");
  localize->add_option("--route-index", route_index, "Index among sampled test routes");

  app.add_subcommand("exp-length", "Accuracy per length bucket and method");
  app.add_subcommand("exp-q", "Accuracy per length bucket and detector accuracy");
  auto* exp_hamming = app.add_subcommand("exp-hamming", "Hamming distance histograms");
  exp_hamming->add_option("--route-index", route_index);
  app.add_subcommand("exp-dist", "Ground-truth and estimated descriptor histograms");
  auto* snapshot = app.add_subcommand("snapshot", "GeoJSON snapshot of a session");
  std::size_t step = 1;
  snapshot->add_option("--step", step, "Step after which to snapshot")->check(CLI::PositiveNumber);
  snapshot->add_option("--route-index", route_index);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    error_line(err, "usage", e.what());
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config_file(config_path);
    if (seed) c.seed = *seed;
    if (out_dir) c.out = *out_dir;
    if (map_path) c.map = *map_path;
    if (osm_path) c.osm = *osm_path;
    if (db_path) c.db = *db_path;
    if (spacing) c.spacing = *spacing;
    if (max_length) c.max_length = *max_length;
    if (routes) c.routes = *routes;
    if (q) c.q = *q;
    if (threads) c.threads = *threads;
    if (!qs.empty()) c.qs = qs;
    if (!lengths.empty()) c.lengths = lengths;
    if (!methods.empty()) c.methods = methods;
    if (mode) c.session.mode = parse_match_mode(*mode);
    if (command == "synth") {
      sp.seed = seed ? *seed : (c.synth ? c.synth->seed : c.seed);
      c.synth = sp;
      c.map.clear();
      c.osm.clear();
    }
    c.session.max_length = c.max_length;
    c.validate();
    const std::uint64_t hash = config_hash(canonical_config(c, command));
    auto csv = [&](const std::string& name) {
      auto f = open_out(c, name);
      write_hash_comment(f, hash);
      return f;
    };

    if (command == "ingest" || command == "synth") {
      if (command == "ingest" && c.osm.empty()) throw ConfigError("ingest needs --osm");
      MapData m = load_map(c);
      auto f = open_out(c, "map.json");
      save_map_json(f, m);
      out << "places=" << m.sampled.places.size() << " locations=" << m.sampled.locations.size()
          << " buildings=" << m.semantic.buildings().size() << '\n';
    } else if (command == "bsd") {
      Loaded l = load_all(c, false);
      std::vector<Bsd> table = l.graph->bsd;
      if (noisy) {
        const auto model = DetectorModel::symmetric(c.q, c.seed);
        for (std::size_t i = 0; i < table.size(); ++i) table[i] = estimate_bsd(table[i], model, {0, i});
      }
      auto f = csv("bsd.csv");
      write_estimates(f, table);
      out << "locations=" << table.size() << '\n';
    } else if (command == "build-db") {
      Loaded l = load_all(c, false);
      RouteDatabase db(l.graph, c.max_length, limit);
      auto f = csv("storage.csv");
      f << "length,routes,truncated,descriptor_bytes,turn_bytes,id_bytes,record_bytes,section_bytes\n";
      for (std::size_t len = 1; len <= c.max_length; ++len) {
        const auto s = db.storage(len);
        f << len << ',' << s.route_count << ',' << db.table(len).truncated << ','
          << s.descriptor_bytes << ',' << s.turn_bytes << ',' << s.id_bytes << ',' << s.record_bytes
          << ',' << s.section_bytes << '\n';
      }
      auto bin = open_out(c, "routes.db", std::ios::binary);
      db.save(bin);
      out << "routes=" << db.table(c.max_length).size() << " at length " << c.max_length << '\n';
    } else if (command == "localize") {
      Loaded l = load_all(c);
      TestRoute r = pick_route(l, c, route_text.value_or(""), route_index);
      if (r.locations.size() > c.max_length && !route_text) r.locations.resize(c.max_length);
      auto log = csv("localize_log.csv");
      log << kRouteLogHeader << '\n';
      if (estimates_path.empty()) {
        const auto model = DetectorModel::symmetric(c.q, c.seed);
        const auto o = run_test_route(*l.matcher, c.session, r, model, route_index, &log);
        out << "declared_step=" << (o.declared_step ? std::to_string(*o.declared_step) : "none")
            << " correct_step=" << (o.correct_step ? std::to_string(*o.correct_step) : "none")
            << '\n';
      } else {
        auto in = open_in(estimates_path);
        const EstimateTable est = load_estimates(in, l.graph->size());
        for (const auto& w : est.warnings) out << "warning: " << w << '\n';
        LocalizationSession s(*l.matcher, c.session);
        for (std::size_t k = 0; k < r.locations.size(); ++k) {
          const LocationId id = r.locations[k];
          auto it = est.estimates.find(id);
          if (it == est.estimates.end()) {
            throw std::runtime_error("no estimate for location " + std::to_string(id));
          }
          std::optional<bool> turn;
          if (k > 0) {
            turn = turn_bit(l.graph->heading[r.locations[k - 1]], l.graph->heading[id],
                            l.graph->turn_threshold);
          }
          if (s.status() == SessionStatus::kLost) s.reset();
          s.step(it->second, turn);
          const auto& h = s.history().back();
          log << route_index << ',' << (k + 1) << ',' << h.query_length << ','
              << to_string(h.status) << ',';
          if (h.top) log << h.top->index;
          log << ',' << h.distance << ',' << h.tie_count << ',' << l.graph->place[id] << ',';
          if (h.current_place != kNoPlace) log << h.current_place;
          log << '\n';
        }
        out << "status=" << to_string(s.status()) << '\n';
      }
    } else if (command == "exp-length" || command == "exp-q") {
      Loaded l = load_all(c);
      const auto test = sample_test_routes(*l.db, c.max_length, c.routes, c.seed);
      if (command == "exp-length") {
        const auto rows =
            accuracy_vs_length(*l.matcher, c.session, test, c.q, c.seed, methods_of(c), c.threads);
        auto f = csv("accuracy_vs_length.csv");
        f << "method,q,bucket,localized,total,percent\n";
        for (const auto& r : rows) {
          f << r.method << ',' << r.q << ",0-" << r.accuracy.bucket << ',' << r.accuracy.localized
            << ',' << r.accuracy.total << ',' << r.accuracy.percent() << '\n';
        }
      } else {
        std::vector<AccuracyRow> rows;
        for (const auto m : methods_of(c)) {
          SessionConfig sc = c.session;
          sc.mode = m;
          auto part = accuracy_vs_q(*l.matcher, sc, test, c.qs, c.seed, c.threads);
          rows.insert(rows.end(), part.begin(), part.end());
        }
        auto f = csv("accuracy_vs_q.csv");
        f << "q,method,bucket,localized,total,percent\n";
        for (const auto& r : rows) {
          f << r.q << ',' << r.method << ",0-" << r.accuracy.bucket << ',' << r.accuracy.localized
            << ',' << r.accuracy.total << ',' << r.accuracy.percent() << '\n';
        }
      }
      out << "routes=" << test.size() << '\n';
    } else if (command == "exp-hamming") {
      for (auto len : c.lengths) {
        if (len > c.max_length) throw ConfigError("lengths must not exceed max_length");
      }
      Loaded l = load_all(c);
      const TestRoute r = pick_route(l, c, "", route_index);
      const auto hist = hamming_histograms(*l.matcher, r, c.lengths,
                                           DetectorModel::symmetric(c.q, c.seed), route_index);
      auto f = csv("hamming_histogram.csv");
      f << "length,turns,distance,count,total,correct_distance\n";
      for (const auto& h : hist) {
        for (std::size_t d = 0; d < h.counts.size(); ++d) {
          f << h.length << ',' << (h.turns ? "on" : "off") << ',' << d << ',' << h.counts[d] << ','
            << h.total << ',' << h.correct_distance << '\n';
        }
        out << "length=" << h.length << " turns=" << (h.turns ? "on" : "off")
            << " candidates=" << h.total << " correct_distance=" << h.correct_distance << '\n';
      }
    } else if (command == "exp-dist") {
      Loaded l = load_all(c, false);
      const auto d = bsd_distribution(l.graph->bsd, DetectorModel::symmetric(c.q, c.seed));
      auto f = csv("bsd_distribution.csv");
      f << "pattern,ground_truth,estimated,predicted\n";
      for (unsigned b = 0; b < 16; ++b) {
        f << Bsd(static_cast<std::uint8_t>(b)).to_string() << ',' << d.ground_truth[b] << ','
          << d.estimated[b] << ',' << d.predicted[b] << '\n';
      }
      out << "total_variation=" << d.total_variation << '\n';
    } else if (command == "snapshot") {
      Loaded l = load_all(c);
      const TestRoute r = pick_route(l, c, "", route_index);
      if (step > r.locations.size()) throw ConfigError("--step exceeds the route length");
      const auto model = DetectorModel::symmetric(c.q, c.seed);
      const Observations obs = simulate_observations(*l.graph, r.locations, model, route_index);
      LocalizationSession s(*l.matcher, c.session);
      for (std::size_t k = 0; k < step; ++k) {
        if (s.status() == SessionStatus::kLost) s.reset();
        std::optional<bool> turn;
        if (s.query_length() > 0) turn = obs.turns[k - 1];
        s.step(obs.bsd[k], turn);
      }
      auto f = open_out(c, "snapshot_step_" + std::to_string(step) + ".geojson");
      write_snapshot_geojson(f, l.map, s, obs, step);
      out << "status=" << to_string(s.status()) << '\n';
    }
    out << "config_hash=" << hex(hash) << '\n';
    return 0;
  } catch (const ConfigError& e) {
    error_line(err, "config", e.what());
    return 2;
  } catch (const OsmParseError& e) {
    error_line(err, "osm_parse", e.what());
    return 3;
  } catch (const MapFormatError& e) {
    error_line(err, "map_format", e.what());
    return 3;
  } catch (const DatabaseFormatError& e) {
    error_line(err, "database_format", e.what());
    return 3;
  } catch (const EstimateFormatError& e) {
    error_line(err, "estimates_format", e.what());
    return 3;
  } catch (const std::exception& e) {
    error_line(err, "runtime", e.what());
    return 1;
  }
}

}  // namespace bsdloc::cli
