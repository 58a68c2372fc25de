#include <bsdloc/experiments.hpp>
#include <bsdloc/probability.hpp>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace bsdloc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Result {
  bool pass;
  std::string detail;
};

BitString random_bits(std::mt19937_64& rng, std::size_t n) {
  BitString s(n);
  for (std::size_t i = 0; i < n; ++i) s.set(i, rng() & 1U);
  return s;
}

Result search_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  const std::size_t widths[] = {4, 60, 160};
  std::size_t mismatches = 0;
  for (int db = 0; db < 20; ++db) {
    const std::size_t bits = widths[db % 3];
    std::vector<BitString> rows;
    BkTree tree(bits);
    for (std::uint32_t i = 0; i < 10000; ++i) {
      rows.push_back(random_bits(rng, bits));
      tree.insert(rows.back(), i);
    }
    for (int k = 0; k < 100; ++k) {
      BitString q = random_bits(rng, bits);
      if (k % 2 == 0) {
        q = rows[rng() % rows.size()];
        for (int f = 0; f < 3; ++f) q.set(rng() % bits, rng() & 1U);
      }
      const auto [best, ids] = oracle::linear_min(rows, q);
      const auto got = tree.nearest(q);
      std::vector<std::uint32_t> got_ids;
      bool same_distance = true;
      for (const auto& c : got) {
        got_ids.push_back(c.route);
        same_distance = same_distance && c.distance == best;
      }
      std::sort(got_ids.begin(), got_ids.end());
      if (!same_distance || got_ids != ids) ++mismatches;
    }
  }
  const double s = seconds_since(t0);
  return {mismatches == 0 && s < 60.0,
          std::to_string(mismatches) + " mismatches in 2000 queries, " + std::to_string(s) + " s"};
}

Result enumeration_equivalence() {
  std::mt19937_64 rng(202);
  std::size_t mismatches = 0;
  for (int g = 0; g < 50; ++g) {
    const std::uint32_t n = 2 + rng() % 49;
    const double p = std::uniform_real_distribution<double>(0.03, 0.2)(rng);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<std::vector<std::uint32_t>> out(n);
    for (std::uint32_t a = 0; a < n; ++a) {
      for (std::uint32_t b = a + 1; b < n; ++b) {
        if (std::uniform_real_distribution<double>(0, 1)(rng) < p) {
          edges.emplace_back(a, b);
          out[a].push_back(b);
          out[b].push_back(a);
        }
      }
    }
    std::vector<std::uint32_t> key(n);
    for (std::uint32_t i = 0; i < n; ++i) key[i] = i;
    const auto adj = AdjacencyMatrix::undirected(n, edges);
    for (std::size_t len = 1; len <= 8; ++len) {
      if (enumerate_routes(adj, len).routes.size() != oracle::count_paths(out, key, len)) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatching (graph, length) pairs of 400"};
}

Result noiseless_localization() {
  const auto t0 = Clock::now();
  std::optional<oracle::CityMap> city;
  std::uint64_t chosen = 0;
  for (std::uint64_t seed = 40; seed < 80 && !city; ++seed) {
    auto c = oracle::make_city(oracle::unique_city(seed));
    if (c.map.sampled.places.size() < 500) continue;
    bool ok = true;
    for (std::size_t len = 11; len <= 15 && ok; ++len) ok = oracle::routes_unique(*c.graph, len);
    if (ok) {
      city = std::move(c);
      chosen = seed;
    }
  }
  if (!city) return {false, "no seed in [40, 80) gave a map unique at lengths 11-15"};
  RouteDatabase db(city->graph, 40);
  RouteMatcher matcher(db);
  const auto routes = sample_test_routes(db, 40, 100, 7);
  SessionConfig cfg;
  const auto outcomes = run_test_routes(matcher, cfg, routes, DetectorModel::symmetric(1.0, 3), 1);
  std::size_t by15 = 0, tracking = 0;
  for (const auto& o : outcomes) {
    if (o.correct_step && *o.correct_step <= 15) ++by15;
    tracking += o.tracking_errors + o.lost_events;
  }
  const double s = seconds_since(t0);
  return {by15 == 100 && tracking == 0 && s < 300.0,
          "seed " + std::to_string(chosen) + ", " + std::to_string(city->map.sampled.places.size()) +
              " places; " + std::to_string(by15) + "/100 by step 15, " + std::to_string(tracking) +
              " tracking errors, " + std::to_string(s) + " s"};
}

struct AccuracyRun {
  std::size_t places = 0;
  std::vector<std::vector<BucketAccuracy>> by_mode;  // bsd+turns, bsd_only, turns_only at q=0.75
  std::vector<std::vector<BucketAccuracy>> by_q;     // bsd+turns at 0.6, 0.75, 0.9, 1.0
  double seconds = 0.0;
};

const AccuracyRun& accuracy_run() {
  static const AccuracyRun run = [] {
    const auto t0 = Clock::now();
    AccuracyRun r;
    auto city = oracle::make_city(oracle::accuracy_city());
    r.places = city.map.sampled.places.size();
    RouteDatabase db(city.graph, 40);
    RouteMatcher matcher(db);
    const auto routes = sample_test_routes(db, 40, 200, 11);
    SessionConfig cfg;
    for (auto mode : {MatchMode::kBsdAndTurns, MatchMode::kBsdOnly, MatchMode::kTurnsOnly}) {
      cfg.mode = mode;
      r.by_mode.push_back(
          bucket_accuracy(run_test_routes(matcher, cfg, routes, DetectorModel::symmetric(0.75, 5))));
    }
    cfg.mode = MatchMode::kBsdAndTurns;
    for (double q : {0.6, 0.75, 0.9, 1.0}) {
      r.by_q.push_back(
          bucket_accuracy(run_test_routes(matcher, cfg, routes, DetectorModel::symmetric(q, 5))));
    }
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

double pct(const std::vector<BucketAccuracy>& b, std::size_t bucket) {
  for (const auto& x : b) {
    if (x.bucket == bucket) return x.percent();
  }
  return -1.0;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Result channel_accuracy() {
  const auto& r = accuracy_run();
  const double a20 = pct(r.by_mode[0], 20);
  const double a40 = pct(r.by_mode[0], 40);
  return {r.places >= 2000 && a20 >= 70.0 && a40 >= 85.0 && r.seconds < 1800.0,
          std::to_string(r.places) + " places, 200 routes, q=0.75: 0-20 " + fmt(a20) + "% (need 70), 0-40 " +
              fmt(a40) + "% (need 85), " + fmt(r.seconds) + " s"};
}

Result monotone_in_q() {
  const auto& r = accuracy_run();
  std::string detail = "0-40 at q=0.6/0.75/0.9/1.0:";
  bool ok = true;
  for (std::size_t i = 0; i < r.by_q.size(); ++i) {
    detail += " " + fmt(pct(r.by_q[i], 40));
    if (i > 0 && pct(r.by_q[i], 40) < pct(r.by_q[i - 1], 40)) ok = false;
  }
  ok = ok && pct(r.by_q.back(), 40) >= 99.0;
  return {ok, detail};
}

Result method_ordering() {
  const auto& r = accuracy_run();
  bool ok = true;
  for (auto b : kLengthBuckets) {
    const double bt = pct(r.by_mode[0], b), bo = pct(r.by_mode[1], b), to = pct(r.by_mode[2], b);
    ok = ok && bt >= bo && bo >= to;
  }
  const double t40 = pct(r.by_mode[2], 40);
  ok = ok && t40 < 30.0;
  return {ok, "0-40 bsd+turns/bsd_only/turns_only: " + fmt(pct(r.by_mode[0], 40)) + "/" +
                  fmt(pct(r.by_mode[1], 40)) + "/" + fmt(t40)};
}

Result probability_formulas() {
  double worst = 0.0;
  auto rel = [&](double got, double want) {
    worst = std::max(worst, std::fabs(got - want) / std::fabs(want));
  };
  for (double q : {0.55, 0.6, 0.75, 0.9, 0.99}) {
    const LikelihoodModel m{q};
    for (int n = 1; n <= 40; n += 3) {
      for (int h = 0; h <= 4 * n; h += 1 + n / 4) {
        rel(posterior_weight(h, n, m), std::pow(q, 4 * n - h) * std::pow(1.0 - q, h));
      }
    }
    for (int hi = 0; hi <= 12; ++hi) {
      for (int hj = 0; hj <= 12; ++hj) rel(likelihood_ratio(hi, hj, m), std::pow((1.0 - q) / q, hi - hj));
    }
  }
  const bool three = log_likelihood_ratio(0, 1, LikelihoodModel{0.75}) == std::log(3.0);

  auto city = oracle::make_city([] {
    SyntheticCityParams p;
    p.rows = 2;
    p.cols = 3;
    return p;
  }());
  RouteDatabase db(city.graph, 6);
  const auto& table = db.table(6);
  std::vector<BitString> descs;
  for (std::uint32_t i = 0; i < table.size(); ++i) descs.push_back(db.descriptor({6, i}));
  std::mt19937_64 rng(9);
  double worst_post = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    BitString obs = descs[rng() % descs.size()];
    for (std::size_t b = 0; b < obs.size(); ++b) {
      if (rng() % 4 == 0) obs.set(b, !obs.get(b));
    }
    std::vector<int> dist;
    for (const auto& d : descs) dist.push_back(oracle::popcount_distance(d, obs));
    const auto got = normalized_posterior(dist, 6, LikelihoodModel{0.75});
    const auto want = oracle::bayes_posterior(descs, obs, 0.75);
    for (std::size_t i = 0; i < got.size(); ++i) worst_post = std::max(worst_post, std::fabs(got[i] - want[i]));
  }
  return {worst <= 1e-12 && three && worst_post <= 1e-9,
          "max rel err " + sci(worst) + ", log ratio == log 3: " + (three ? "yes" : "no") +
              ", posterior max abs err " + sci(worst_post)};
}

Result storage_accounting() {
  const auto s40 = storage_for(40, 1);
  const auto big = storage_for(40, 40'000'000);
  const bool arithmetic = s40.descriptor_bytes == 20 && big.descriptor_bytes == 800'000'000;

  auto city = oracle::make_city([] {
    SyntheticCityParams p;
    p.rows = 6;
    p.cols = 6;
    p.line_jitter = 0.15;
    p.street_drop = 0.1;
    return p;
  }());
  RouteDatabase db(city.graph, 40);
  std::size_t up_to = 0, total = 0;
  while (up_to < 40 && total < 100000) total += db.table(++up_to).size();
  std::vector<LengthStorage> sections;
  for (std::size_t l = 1; l <= up_to; ++l) sections.push_back(db.storage(l));
  const auto predicted = database_file_bytes(sections);
  std::ostringstream out;
  db.save(out, up_to);
  const auto measured = out.str().size();
  const double err = std::fabs(static_cast<double>(measured) - predicted) / predicted;
  return {arithmetic && total >= 100000 && err <= 0.05,
          "20 B/route at 40: " + std::string(s40.descriptor_bytes == 20 ? "yes" : "no") + ", 4e7 routes -> " +
              std::to_string(big.descriptor_bytes) + " B; " + std::to_string(total) + " routes file " +
              std::to_string(measured) + " B vs predicted " + std::to_string(predicted) + " B"};
}

Result geometry_oracle() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  const SectorSpec spec;
  std::size_t mismatches = 0, gaps = 0;
  for (int layout = 0; layout < 1000; ++layout) {
    std::vector<Polygon> buildings;
    const int nb = 1 + static_cast<int>(rng() % 24);
    for (int b = 0; b < nb; ++b) {
      const GeoPoint c{u(rng), u(rng)};
      const double w = 2.0 + std::fabs(u(rng)) / 3.0, h = 2.0 + std::fabs(u(rng)) / 3.0;
      const double rot = std::fabs(u(rng)) * 4.5;
      Polygon ring;
      for (auto [sx, sy] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}) {
        const double x = sx * w / 2, y = sy * h / 2, r = rot * std::numbers::pi / 180.0;
        ring.push_back({c.x + x * std::cos(r) - y * std::sin(r), c.y + x * std::sin(r) + y * std::cos(r)});
      }
      buildings.push_back(ring);
    }
    const SemanticMap map({}, buildings, {});
    DirectedLocation loc;
    loc.heading = std::fabs(u(rng)) * 9.0;
    for (View v : {View::kLeft, View::kRight}) {
      const bool got = gap_bit(loc, map, v, spec);
      const bool want = oracle::exact_gap(loc.position, view_axis_deg(loc.heading, v), buildings, spec);
      mismatches += got != want;
      gaps += want;
    }
  }

  auto city = oracle::make_city([] {
    SyntheticCityParams p;
    p.rows = 5;
    p.cols = 5;
    p.line_jitter = 0.15;
    p.street_drop = 0.1;
    return p;
  }());
  const auto& g = *city.graph;
  std::size_t pairs = 0, violations = 0;
  for (std::uint32_t a = 0; a < g.size(); ++a) {
    for (std::uint32_t b = a + 1; b < g.size(); ++b) {
      if (g.place[a] != g.place[b]) continue;
      if (std::fabs(smallest_angle_deg(g.heading[a], g.heading[b]) - 180.0) > 1e-9) continue;
      ++pairs;
      violations += g.bsd[b] != reverse_bsd(g.bsd[a]);
    }
  }
  return {mismatches == 0 && pairs > 0 && violations == 0,
          std::to_string(mismatches) + " gap mismatches over 2000 sectors (" + std::to_string(gaps) +
              " gaps); " + std::to_string(violations) + " reversal violations over " + std::to_string(pairs) +
              " opposite pairs"};
}

Result detector_channel() {
  const std::size_t n = 100000;
  const auto model = DetectorModel::symmetric(0.75, 77);
  std::mt19937_64 rng(404);
  std::array<std::size_t, 4> correct{};
  std::vector<Bsd> truth(n), first(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = Bsd(static_cast<std::uint8_t>(rng() & 15U));
    first[i] = estimate_bsd(truth[i], model, {i % 97, i});
    for (int b = 0; b < 4; ++b) correct[b] += first[i].bit(b) == truth[i].bit(b);
  }
  const double sigma = std::sqrt(0.75 * 0.25 / n);
  bool within = true;
  std::string detail = "per-bit accuracy:";
  for (int b = 0; b < 4; ++b) {
    const double acc = static_cast<double>(correct[b]) / n;
    within = within && std::fabs(acc - 0.75) <= 3.0 * sigma;
    detail += " " + std::to_string(acc);
  }
  std::ostringstream a, b;
  write_estimates(a, first);
  std::vector<Bsd> again(n);
  for (std::size_t i = 0; i < n; ++i) again[i] = estimate_bsd(truth[i], model, {i % 97, i});
  write_estimates(b, again);
  const bool same = a.str() == b.str();
  return {within && same, detail + " (3 sigma = " + std::to_string(3 * sigma) + "), rerun identical: " +
                              (same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    Result (*run)();
  };
  const Criterion criteria[] = {
      {"search oracle equivalence", search_equivalence},
      {"enumeration oracle equivalence", enumeration_equivalence},
      {"noiseless localization", noiseless_localization},
      {"accuracy at q=0.75", channel_accuracy},
      {"monotonicity in q", monotone_in_q},
      {"method ordering", method_ordering},
      {"probability formulas", probability_formulas},
      {"storage accounting", storage_accounting},
      {"geometry oracle", geometry_oracle},
      {"detector channel", detector_channel},
  };
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (int i = 0; i < 10; ++i) {
    if (only != 0 && only != i + 1) continue;
    Result r;
    try {
      r = criteria[i].run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                r.detail.c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  return failed == 0 ? 0 : 1;
}
