#include <gtest/gtest.h>

#include <bsdloc/experiments.hpp>
#include <bsdloc/synthetic_city.hpp>

#include <json.hpp>

#include <numeric>
#include <sstream>

#include "oracles.hpp"

using namespace bsdloc;

namespace {

struct Fixture {
  oracle::CityMap city;
  std::unique_ptr<RouteDatabase> db;
  std::unique_ptr<RouteMatcher> matcher;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    SyntheticCityParams p;
    p.rows = 4;
    p.cols = 4;
    p.line_jitter = 0.15;
    x.city = oracle::make_city(p);
    x.db = std::make_unique<RouteDatabase>(x.city.graph, 12);
    x.matcher = std::make_unique<RouteMatcher>(*x.db);
    return x;
  }();
  return f;
}

}  // namespace

TEST(Sampling, DeterministicAndWithoutReplacement) {
  const auto& f = fixture();
  const auto a = sample_test_routes(*f.db, 8, 30, 5);
  const auto b = sample_test_routes(*f.db, 8, 30, 5);
  ASSERT_EQ(a.size(), 30u);
  std::set<std::uint32_t> ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].index, b[i].index);
    EXPECT_EQ(a[i].locations, f.db->route({8, a[i].index}));
    ids.insert(a[i].index);
  }
  EXPECT_EQ(ids.size(), 30u);
}

TEST(Sampling, TooFewRoutesNamesAvailableCount) {
  const auto& f = fixture();
  const auto n = f.db->table(1).size();
  try {
    sample_test_routes(*f.db, 1, n + 1, 0);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(std::to_string(n)), std::string::npos);
  }
}

TEST(Simulation, NoiselessObservationsEqualGroundTruth) {
  const auto& f = fixture();
  const auto r = sample_test_routes(*f.db, 10, 1, 2).front();
  const auto obs = simulate_observations(*f.city.graph, r.locations, DetectorModel::symmetric(1.0, 0), 0);
  const auto [desc, turns] = oracle::route_code(*f.city.graph, r.locations);
  std::string d, t;
  for (auto b : obs.bsd) d += b.to_string();
  for (bool x : obs.turns) t += x ? '1' : '0';
  EXPECT_EQ(d, desc);
  EXPECT_EQ(t, turns);
}

TEST(Buckets, CumulativeCounts) {
  std::vector<RouteOutcome> o(4);
  o[0].correct_step = 3;
  o[1].correct_step = 12;
  o[2].correct_step = 40;
  const auto acc = bucket_accuracy(o);
  ASSERT_EQ(acc.size(), kLengthBuckets.size());
  EXPECT_EQ(acc[0].localized, 1u);
  EXPECT_EQ(acc[2].localized, 2u);
  EXPECT_EQ(acc[7].localized, 3u);
  EXPECT_EQ(acc[7].total, 4u);
  EXPECT_DOUBLE_EQ(acc[7].percent(), 75.0);
}

TEST(Runs, ThreadCountDoesNotChangeOutcomes) {
  const auto& f = fixture();
  const auto routes = sample_test_routes(*f.db, 20 > 12 ? 12 : 20, 12, 1);
  const auto m = DetectorModel::symmetric(0.9, 7);
  SessionConfig cfg;
  cfg.max_length = 12;
  const auto a = run_test_routes(*f.matcher, cfg, routes, m, 1);
  const auto b = run_test_routes(*f.matcher, cfg, routes, m, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].route, b[i].route);
    EXPECT_EQ(a[i].correct_step, b[i].correct_step);
    EXPECT_EQ(a[i].declared_step, b[i].declared_step);
    EXPECT_EQ(a[i].tracking_errors, b[i].tracking_errors);
  }
}

TEST(Runs, RouteLogRowsMatchSteps) {
  const auto& f = fixture();
  const auto r = sample_test_routes(*f.db, 12, 1, 9).front();
  std::ostringstream log;
  SessionConfig cfg;
  cfg.max_length = 12;
  run_test_route(*f.matcher, cfg, r, DetectorModel::symmetric(0.75, 1), 0, &log);
  std::size_t lines = 0;
  for (char ch : log.str()) lines += ch == '\n';
  EXPECT_EQ(lines, r.locations.size());
}

TEST(Kernel, RowsAreDistributions) {
  for (double q : {0.5, 0.75, 1.0}) {
    const auto k = confusion_kernel(DetectorModel::symmetric(q, 0));
    for (const auto& row : k) EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
    if (q == 0.5) {
      for (const auto& row : k) {
        for (double x : row) EXPECT_DOUBLE_EQ(x, 1.0 / 16);
      }
    }
    if (q == 1.0) {
      for (int i = 0; i < 16; ++i) EXPECT_DOUBLE_EQ(k[i][i], 1.0);
    }
  }
  const auto k = confusion_kernel(DetectorModel::symmetric(0.75, 0));
  EXPECT_DOUBLE_EQ(k[0b0000][0b0011], 0.75 * 0.75 * 0.25 * 0.25);
}

TEST(Distribution, PerfectChannelKeepsHistogram) {
  const auto& g = *fixture().city.graph;
  const auto d = bsd_distribution(g.bsd, DetectorModel::symmetric(1.0, 0));
  EXPECT_EQ(d.ground_truth, d.estimated);
  EXPECT_NEAR(d.total_variation, 0.0, 1e-12);
  std::uint64_t total = 0;
  for (auto c : d.ground_truth) total += c;
  EXPECT_EQ(total, g.size());
}

TEST(Distribution, NoisyChannelFollowsPrediction) {
  const auto c = oracle::make_city(oracle::accuracy_city());
  const auto d = bsd_distribution(c.graph->bsd, DetectorModel::symmetric(0.75, 3));
  EXPECT_LT(d.total_variation, 0.05);
  EXPECT_NEAR(std::accumulate(d.predicted.begin(), d.predicted.end(), 0.0), 1.0, 1e-12);
}

TEST(Histogram, TotalsMatchTableAndTurnFilterShrinksIt) {
  const auto& f = fixture();
  const auto r = sample_test_routes(*f.db, 12, 1, 4).front();
  const auto h = hamming_histograms(*f.matcher, r, {4, 8, 12}, DetectorModel::symmetric(0.75, 2), 0);
  ASSERT_EQ(h.size(), 6u);
  for (std::size_t i = 0; i < h.size(); i += 2) {
    const auto& off = h[i].turns ? h[i + 1] : h[i];
    const auto& on = h[i].turns ? h[i] : h[i + 1];
    EXPECT_EQ(off.total, f.db->table(off.length).size());
    EXPECT_LE(on.total, off.total);
    EXPECT_EQ(std::accumulate(off.counts.begin(), off.counts.end(), std::uint64_t{0}), off.total);
    EXPECT_GE(off.correct_distance, 0);
    EXPECT_EQ(on.correct_distance, off.correct_distance);
  }
  EXPECT_THROW(hamming_histograms(*f.matcher, r, {13}, DetectorModel::symmetric(0.75, 2), 0),
               std::invalid_argument);
}

TEST(Hash, Fnv1aKnownValues) {
  EXPECT_EQ(config_hash(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(config_hash("a"), 0xaf63dc4c8601ec8cULL);
  std::ostringstream out;
  write_hash_comment(out, 0xabcULL);
  EXPECT_EQ(out.str(), "# config_hash=0000000000000abc\n");
}

TEST(Snapshot, GeoJsonStructure) {
  const auto& f = fixture();
  const auto r = sample_test_routes(*f.db, 10, 1, 6).front();
  const auto obs = simulate_observations(*f.city.graph, r.locations, DetectorModel::symmetric(1.0, 0), 0);
  LocalizationSession s(*f.matcher);
  for (std::size_t k = 0; k < 6; ++k) {
    s.step(obs.bsd[k], k == 0 ? std::nullopt : std::optional<bool>(obs.turns[k - 1]));
  }
  std::ostringstream out;
  write_snapshot_geojson(out, f.city.map, s, obs, 6);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["type"], "FeatureCollection");
  std::size_t points = 0, lines = 0;
  for (const auto& feat : j["features"]) {
    const std::string t = feat["geometry"]["type"];
    points += t == "Point";
    lines += t == "LineString";
  }
  EXPECT_GT(points, 1u);
  EXPECT_EQ(lines, 1u);
}
