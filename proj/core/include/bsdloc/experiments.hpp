#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bsdloc/detector.hpp"
#include "bsdloc/map_data.hpp"
#include "bsdloc/session.hpp"

namespace bsdloc {

inline constexpr std::array<std::size_t, 8> kLengthBuckets = {5, 10, 15, 20, 25, 30, 35, 40};

struct TestRoute {
  std::uint32_t index = 0;
  std::vector<LocationId> locations;
};

/// Uniform sample without replacement among stored routes of `length`.
/// Throws std::runtime_error naming the available count if there are too few.
std::vector<TestRoute> sample_test_routes(const RouteDatabase& db, std::size_t length,
                                          std::size_t count, std::uint64_t seed);

struct Observations {
  std::vector<Bsd> bsd;
  /// turns[k] is the turn bit between steps k and k+1.
  std::vector<bool> turns;
};

/// Detector output along a route; draws use (model.seed, stream, step).
Observations simulate_observations(const LocationGraph& graph, std::span<const LocationId> route,
                                   const DetectorModel& model, std::uint64_t stream);

struct RouteOutcome {
  std::uint32_t route = 0;
  /// First step (1-based) that is localized with the correct current place.
  std::optional<std::size_t> correct_step;
  /// First step at which localization was declared.
  std::optional<std::size_t> declared_step;
  /// Localized steps whose current place differed from the truth.
  std::size_t tracking_errors = 0;
  std::size_t lost_events = 0;
};

inline constexpr const char* kRouteLogHeader =
    "route,step,query_length,status,best_route,distance,tie_count,true_place,current_place";

/// Runs one session over the route, resetting after a lost step. With a log,
/// one kRouteLogHeader row is written per step.
RouteOutcome run_test_route(const RouteMatcher& matcher, const SessionConfig& config,
                            const TestRoute& route, const DetectorModel& model,
                            std::uint64_t stream, std::ostream* log = nullptr);

/// Outcomes in route order. Routes are processed on `threads` workers.
std::vector<RouteOutcome> run_test_routes(const RouteMatcher& matcher, const SessionConfig& config,
                                          const std::vector<TestRoute>& routes,
                                          const DetectorModel& model, unsigned threads = 0);

struct BucketAccuracy {
  std::size_t bucket = 0;
  std::size_t localized = 0;
  std::size_t total = 0;
  double percent() const { return total == 0 ? 0.0 : 100.0 * localized / total; }
};

/// Cumulative: a route counts in bucket b if its correct step is <= b.
std::vector<BucketAccuracy> bucket_accuracy(const std::vector<RouteOutcome>& outcomes,
                                            std::span<const std::size_t> buckets = kLengthBuckets);

struct AccuracyRow {
  std::string method;
  double q = 1.0;
  BucketAccuracy accuracy;
};

std::vector<AccuracyRow> accuracy_vs_length(const RouteMatcher& matcher, SessionConfig config,
                                            const std::vector<TestRoute>& routes, double q,
                                            std::uint64_t seed,
                                            const std::vector<MatchMode>& methods,
                                            unsigned threads = 0);
std::vector<AccuracyRow> accuracy_vs_q(const RouteMatcher& matcher, SessionConfig config,
                                       const std::vector<TestRoute>& routes,
                                       const std::vector<double>& qs, std::uint64_t seed,
                                       unsigned threads = 0);

struct HammingHistogram {
  std::size_t length = 0;
  bool turns = false;
  /// counts[d] = candidates at distance d.
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  int correct_distance = -1;
};

/// Distances from the noisy query of the route's first `length` steps to every
/// stored route of that length, with and without the turn filter.
std::vector<HammingHistogram> hamming_histograms(const RouteMatcher& matcher,
                                                 const TestRoute& route,
                                                 const std::vector<std::size_t>& lengths,
                                                 const DetectorModel& model, std::uint64_t stream);

/// 16x16 channel matrix: kernel[i][j] = P(report j | true i).
std::array<std::array<double, 16>, 16> confusion_kernel(const DetectorModel& model);

struct BsdDistribution {
  std::array<std::uint64_t, 16> ground_truth{};
  std::array<std::uint64_t, 16> estimated{};
  /// Ground-truth histogram pushed through confusion_kernel, as probabilities.
  std::array<double, 16> predicted{};
  double total_variation = 0.0;
};

BsdDistribution bsd_distribution(std::span<const Bsd> table, const DetectorModel& model);

/// 64-bit FNV-1a of a text.
std::uint64_t config_hash(std::string_view text);
/// "# config_hash=<16 hex digits>" followed by a newline.
void write_hash_comment(std::ostream& out, std::uint64_t hash);

/// GeoJSON FeatureCollection: one Point per place with the smallest distance
/// of any candidate route through it, the current top route as a LineString
/// and the current position with the session status.
void write_snapshot_geojson(std::ostream& out, const MapData& map, const LocalizationSession& session,
                            const Observations& observed, std::size_t steps);

}  // namespace bsdloc
