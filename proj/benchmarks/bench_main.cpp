#include <benchmark/benchmark.h>

#include <bsdloc/bk_tree.hpp>
#include <bsdloc/map_data.hpp>
#include <bsdloc/matcher.hpp>
#include <bsdloc/route_db.hpp>
#include <bsdloc/synthetic_city.hpp>

#include <random>

using namespace bsdloc;

namespace {

BitString random_bits(std::mt19937_64& rng, std::size_t n) {
  BitString s(n);
  for (std::size_t i = 0; i < n; ++i) s.set(i, rng() & 1U);
  return s;
}

std::shared_ptr<const LocationGraph> city_graph(std::size_t size) {
  SyntheticCityParams p;
  p.rows = size;
  p.cols = size;
  p.line_jitter = 0.15;
  p.street_drop = 0.1;
  const MapData m = map_from_synthetic(generate_synthetic_city(p), 10.0);
  return std::make_shared<const LocationGraph>(make_location_graph(m.sampled, compute_bsd_table(m, {})));
}

void BM_Hamming(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto bits = static_cast<std::size_t>(state.range(0));
  const auto a = random_bits(rng, bits);
  const auto b = random_bits(rng, bits);
  for (auto _ : state) benchmark::DoNotOptimize(hamming(a, b));
}
BENCHMARK(BM_Hamming)->Arg(60)->Arg(160);

void BM_BkTreeNearest(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const std::size_t bits = 80;
  BkTree tree(bits);
  const auto centre = random_bits(rng, bits);
  for (std::uint32_t i = 0; i < state.range(0); ++i) {
    auto s = centre;
    for (int k = 0; k < 12; ++k) s.set(rng() % bits, rng() & 1U);
    tree.insert(s, i);
  }
  for (auto _ : state) {
    auto q = centre;
    q.set(rng() % bits, rng() & 1U);
    benchmark::DoNotOptimize(tree.nearest(q));
  }
}
BENCHMARK(BM_BkTreeNearest)->Arg(10000)->Arg(100000);

void BM_LinearNearest(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const std::size_t bits = 80;
  const auto centre = random_bits(rng, bits);
  std::vector<Word> flat;
  std::size_t stride = 0;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    auto s = centre;
    for (int k = 0; k < 12; ++k) s.set(rng() % bits, rng() & 1U);
    stride = s.words().size();
    flat.insert(flat.end(), s.words().begin(), s.words().end());
  }
  for (auto _ : state) {
    auto q = centre;
    q.set(rng() % bits, rng() & 1U);
    benchmark::DoNotOptimize(linear_nearest(flat, stride, q.words()));
  }
}
BENCHMARK(BM_LinearNearest)->Arg(10000)->Arg(100000);

void BM_DatabaseBuild(benchmark::State& state) {
  const auto g = city_graph(5);
  const auto len = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    RouteDatabase db(g, len);
    benchmark::DoNotOptimize(db.table(len).size());
  }
}
BENCHMARK(BM_DatabaseBuild)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Match(benchmark::State& state) {
  const auto g = city_graph(6);
  RouteDatabase db(g, 15);
  RouteMatcher matcher(db);
  matcher.match(db.descriptor({15, 0}), db.turns({15, 0}));
  std::mt19937_64 rng(3);
  const auto n = db.table(15).size();
  for (auto _ : state) {
    const RouteRef r{15, static_cast<std::uint32_t>(rng() % n)};
    benchmark::DoNotOptimize(matcher.match(db.descriptor(r), db.turns(r)));
  }
}
BENCHMARK(BM_Match)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
