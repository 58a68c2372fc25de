#include "bsdloc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <random>
#include <thread>
#include <unordered_map>

namespace bsdloc {

std::vector<TestRoute> sample_test_routes(const RouteDatabase& db, std::size_t length,
                                          std::size_t count, std::uint64_t seed) {
  const RouteTable& t = db.table(length);
  if (t.size() < count) {
    throw std::runtime_error("requested " + std::to_string(count) + " test routes of length " +
                             std::to_string(length) + " but only " + std::to_string(t.size()) +
                             " exist");
  }
  std::mt19937_64 rng(seed);
  // partial Fisher-Yates over a lazily materialized permutation
  std::unordered_map<std::uint32_t, std::uint32_t> swapped;
  auto at = [&](std::uint32_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<TestRoute> out;
  const auto n = static_cast<std::uint32_t>(t.size());
  for (std::uint32_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::uint32_t> pick(k, n - 1);
    const std::uint32_t j = pick(rng);
    const std::uint32_t vj = at(j);
    swapped[j] = at(k);
    swapped[k] = vj;
    out.push_back({vj, db.route({static_cast<std::uint32_t>(length), vj})});
  }
  return out;
}

Observations simulate_observations(const LocationGraph& graph, std::span<const LocationId> route,
                                   const DetectorModel& model, std::uint64_t stream) {
  model.validate();
  Observations o;
  for (std::size_t k = 0; k < route.size(); ++k) {
    o.bsd.push_back(estimate_bsd(graph.bsd[route[k]], model, {stream, k}));
    if (k > 0) {
      o.turns.push_back(
          turn_bit(graph.heading[route[k - 1]], graph.heading[route[k]], graph.turn_threshold));
    }
  }
  return o;
}

RouteOutcome run_test_route(const RouteMatcher& matcher, const SessionConfig& config,
                            const TestRoute& route, const DetectorModel& model,
                            std::uint64_t stream, std::ostream* log) {
  const LocationGraph& g = matcher.database().graph();
  const Observations obs = simulate_observations(g, route.locations, model, stream);
  LocalizationSession s(matcher, config);
  RouteOutcome out;
  out.route = route.index;
  bool fresh = true;
  for (std::size_t k = 0; k < obs.bsd.size(); ++k) {
    std::optional<bool> turn;
    if (!fresh) turn = obs.turns[k - 1];
    const auto r = s.step(obs.bsd[k], turn);
    fresh = false;
    if (log) {
      const auto& h = s.history().back();
      *log << route.index << ',' << (k + 1) << ',' << h.query_length << ',' << to_string(h.status)
           << ',';
      if (h.top) *log << h.top->index;
      *log << ',' << h.distance << ',' << h.tie_count << ',' << g.place[route.locations[k]] << ',';
      if (h.current_place != kNoPlace) *log << h.current_place;
      *log << '\n';
    }
    if (r.status == SessionStatus::kLost) {
      ++out.lost_events;
      s.reset();
      fresh = true;
      continue;
    }
    if (r.status == SessionStatus::kLocalized) {
      if (!out.declared_step) out.declared_step = k + 1;
      const bool correct = s.current_place() == g.place[route.locations[k]];
      if (correct && !out.correct_step) out.correct_step = k + 1;
      if (!correct) ++out.tracking_errors;
    }
  }
  return out;
}

std::vector<RouteOutcome> run_test_routes(const RouteMatcher& matcher, const SessionConfig& config,
                                          const std::vector<TestRoute>& routes,
                                          const DetectorModel& model, unsigned threads) {
  std::vector<RouteOutcome> out(routes.size());
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, routes.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < routes.size(); i = next++) {
      out[i] = run_test_route(matcher, config, routes[i], model, i);
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return out;
}

std::vector<BucketAccuracy> bucket_accuracy(const std::vector<RouteOutcome>& outcomes,
                                            std::span<const std::size_t> buckets) {
  std::vector<BucketAccuracy> out;
  for (auto b : buckets) {
    BucketAccuracy a;
    a.bucket = b;
    a.total = outcomes.size();
    for (const auto& o : outcomes) {
      if (o.correct_step && *o.correct_step <= b) ++a.localized;
    }
    out.push_back(a);
  }
  return out;
}

std::vector<AccuracyRow> accuracy_vs_length(const RouteMatcher& matcher, SessionConfig config,
                                            const std::vector<TestRoute>& routes, double q,
                                            std::uint64_t seed,
                                            const std::vector<MatchMode>& methods,
                                            unsigned threads) {
  std::vector<AccuracyRow> rows;
  const auto model = DetectorModel::symmetric(q, seed);
  for (MatchMode m : methods) {
    config.mode = m;
    const auto outcomes = run_test_routes(matcher, config, routes, model, threads);
    for (const auto& b : bucket_accuracy(outcomes)) {
      rows.push_back({std::string(to_string(m)), q, b});
    }
  }
  return rows;
}

std::vector<AccuracyRow> accuracy_vs_q(const RouteMatcher& matcher, SessionConfig config,
                                       const std::vector<TestRoute>& routes,
                                       const std::vector<double>& qs, std::uint64_t seed,
                                       unsigned threads) {
  std::vector<AccuracyRow> rows;
  for (double q : qs) {
    const auto model = DetectorModel::symmetric(q, seed);
    const auto outcomes = run_test_routes(matcher, config, routes, model, threads);
    for (const auto& b : bucket_accuracy(outcomes)) {
      rows.push_back({std::string(to_string(config.mode)), q, b});
    }
  }
  return rows;
}

std::vector<HammingHistogram> hamming_histograms(const RouteMatcher& matcher,
                                                 const TestRoute& route,
                                                 const std::vector<std::size_t>& lengths,
                                                 const DetectorModel& model, std::uint64_t stream) {
  const RouteDatabase& db = matcher.database();
  const Observations obs = simulate_observations(db.graph(), route.locations, model, stream);
  std::vector<HammingHistogram> out;
  for (auto len : lengths) {
    if (len == 0 || len > route.locations.size()) {
      throw std::invalid_argument("hamming histogram length " + std::to_string(len) +
                                  " exceeds the test route");
    }
    BitString desc;
    for (std::size_t k = 0; k < len; ++k) append_descriptor(desc, obs.bsd[k]);
    BitString turns;
    for (std::size_t k = 0; k + 1 < len; ++k) turns.push_back(obs.turns[k]);
    const auto span = std::span<const LocationId>(route.locations).first(len);
    const auto truth = db.find(span);
    const RouteTable& t = db.table(len);
    for (bool filter : {false, true}) {
      HammingHistogram h;
      h.length = len;
      h.turns = filter;
      h.counts.assign(4 * len + 1, 0);
      for (std::uint32_t i = 0; i < t.size(); ++i) {
        if (filter && t.turns.to_bit_string(i) != turns) continue;
        const int d = hamming_words(desc.words(), t.descriptors.row(i));
        ++h.counts[d];
        ++h.total;
        if (truth && *truth == i) h.correct_distance = d;
      }
      out.push_back(std::move(h));
    }
  }
  return out;
}

std::array<std::array<double, 16>, 16> confusion_kernel(const DetectorModel& model) {
  model.validate();
  std::array<std::array<double, 16>, 16> k{};
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      double p = 1.0;
      for (View v : kAllViews) {
        const bool ti = Bsd(static_cast<std::uint8_t>(i)).get(v);
        const bool tj = Bsd(static_cast<std::uint8_t>(j)).get(v);
        const double a = model.accuracy(v, ti);
        p *= ti == tj ? a : 1.0 - a;
      }
      k[i][j] = p;
    }
  }
  return k;
}

BsdDistribution bsd_distribution(std::span<const Bsd> table, const DetectorModel& model) {
  BsdDistribution d;
  for (std::size_t i = 0; i < table.size(); ++i) {
    ++d.ground_truth[table[i].bits()];
    ++d.estimated[estimate_bsd(table[i], model, {0, i}).bits()];
  }
  if (table.empty()) return d;
  const auto k = confusion_kernel(model);
  const double n = static_cast<double>(table.size());
  for (int j = 0; j < 16; ++j) {
    double p = 0.0;
    for (int i = 0; i < 16; ++i) p += static_cast<double>(d.ground_truth[i]) / n * k[i][j];
    d.predicted[j] = p;
  }
  double tv = 0.0;
  for (int j = 0; j < 16; ++j) tv += std::abs(static_cast<double>(d.estimated[j]) / n - d.predicted[j]);
  d.total_variation = tv / 2.0;
  return d;
}

std::uint64_t config_hash(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_hash_comment(std::ostream& out, std::uint64_t hash) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  out << "# config_hash=" << buf << '\n';
}

void write_snapshot_geojson(std::ostream& out, const MapData& map, const LocalizationSession& session,
                            const Observations& observed, std::size_t steps) {
  using nlohmann::json;
  const std::size_t len = session.query_length();
  if (len == 0 || steps < len || steps > observed.bsd.size()) {
    throw std::invalid_argument("snapshot: session has no query for this step");
  }
  BitString desc;
  for (std::size_t k = steps - len; k < steps; ++k) append_descriptor(desc, observed.bsd[k]);
  BitString turns;
  for (std::size_t k = steps - len; k + 1 < steps; ++k) turns.push_back(observed.turns[k]);

  const auto length = static_cast<std::uint32_t>(len);
  const RouteDatabase& db = session.matcher().database();
  const RouteTable& t = db.table(length);
  const bool filter = session.config().mode != MatchMode::kBsdOnly;
  const bool use_desc = session.config().mode != MatchMode::kTurnsOnly;
  constexpr int kNone = std::numeric_limits<int>::max();
  std::vector<int> closeness(map.sampled.places.size(), kNone);
  std::vector<LocationId> ids;
  for (std::uint32_t i = 0; i < t.size(); ++i) {
    if (filter && t.turns.to_bit_string(i) != turns) continue;
    const int d = use_desc ? hamming_words(desc.words(), t.descriptors.row(i)) : 0;
    db.route_into({length, i}, ids);
    for (auto id : ids) {
      auto& c = closeness[db.graph().place[id]];
      c = std::min(c, d);
    }
  }

  auto lonlat = [&](const GeoPoint& p) {
    const LatLon ll = unproject(p, map.origin);
    return json::array({ll.lon, ll.lat});
  };
  json features = json::array();
  for (const auto& pl : map.sampled.places) {
    json props = {{"kind", "place"}, {"place", pl.id}};
    props["closeness"] = closeness[pl.id] == kNone ? json(nullptr) : json(closeness[pl.id]);
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", lonlat(pl.position)}}},
                        {"properties", std::move(props)}});
  }
  if (auto top = session.top()) {
    json line = json::array();
    for (auto pid : db.route_places(*top)) line.push_back(lonlat(map.sampled.places[pid].position));
    const auto& h = session.history().back();
    json props = {{"kind", "best_route"},
                  {"route", top->index},
                  {"length", top->length},
                  {"distance", h.distance},
                  {"tie_count", h.tie_count},
                  {"unique", h.unique}};
    if (line.size() >= 2) {
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "LineString"}, {"coordinates", std::move(line)}}},
                          {"properties", std::move(props)}});
    }
    const PlaceId cur = *session.current_place();
    features.push_back(
        {{"type", "Feature"},
         {"geometry", {{"type", "Point"}, {"coordinates", lonlat(map.sampled.places[cur].position)}}},
         {"properties",
          {{"kind", "current_position"}, {"place", cur}, {"status", to_string(session.status())}, {"step", steps}}}});
  }
  json fc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  out << fc.dump() << '\n';
}

}  // namespace bsdloc
