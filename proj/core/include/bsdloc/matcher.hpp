#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bsdloc/bk_tree.hpp"
#include "bsdloc/route_db.hpp"

namespace bsdloc {

enum class MatchMode { kBsdAndTurns, kBsdOnly, kTurnsOnly };

std::string_view to_string(MatchMode mode);
/// Accepts "bsd+turns", "bsd_only", "turns_only"; throws std::invalid_argument otherwise.
MatchMode parse_match_mode(std::string_view text);

enum class MatchStatus {
  kOk,
  /// No stored route has the query's turn pattern.
  kTurnFilterEmpty,
  /// No stored routes of the query length.
  kNoRoutes,
};

struct MatchOptions {
  MatchMode mode = MatchMode::kBsdAndTurns;
  int tiers = 1;
  /// Cap on `ranked`; tie_count is always exact.
  std::size_t max_reported = 4096;
};

struct MatchResult {
  std::size_t length = 0;
  MatchStatus status = MatchStatus::kOk;
  /// Ascending by (distance, route). Route ids index the length's table.
  std::vector<Candidate> ranked;
  std::size_t tie_count = 0;
  bool unique_best = false;
  int best_distance = 0;
  /// Routes that passed the turn filter (all routes when turns are ignored).
  std::size_t candidates = 0;
};

/// Per-length search structure: one BK tree per distinct turn pattern.
class LengthIndex {
 public:
  struct Partition {
    std::vector<std::uint32_t> routes;
    BkTree tree;
  };

  LengthIndex(const RouteTable& table);

  std::size_t length() const { return length_; }
  std::size_t route_count() const { return route_count_; }
  std::size_t partition_count() const { return partitions_.size(); }
  const Partition* partition(const BitString& turns) const;
  const std::vector<Partition>& partitions() const { return partitions_; }
  double build_seconds() const { return build_seconds_; }

 private:
  std::size_t length_;
  std::size_t route_count_;
  std::vector<Partition> partitions_;
  std::unordered_map<BitString, std::uint32_t, BitStringHash> by_pattern_;
  double build_seconds_ = 0.0;
};

/// Route matching against a database: exact turn-pattern filter, then
/// nearest descriptors by Hamming distance. Indexes are built on first use
/// and shared between threads afterwards.
class RouteMatcher {
 public:
  explicit RouteMatcher(const RouteDatabase& db);

  const RouteDatabase& database() const { return *db_; }
  const LengthIndex& index(std::size_t length) const;

  /// Throws std::invalid_argument if the descriptor is not 4L bits and the
  /// turn pattern not L-1 bits for some stored length L.
  MatchResult match(const BitString& descriptor, const BitString& turns,
                    const MatchOptions& options = {}) const;

 private:
  struct Slot {
    std::once_flag once;
    std::unique_ptr<LengthIndex> index;
  };
  const RouteDatabase* db_;
  std::vector<std::unique_ptr<Slot>> slots_;
};

/// Reference matcher: exhaustive scan of a route table with the same
/// filtering and ordering rules.
MatchResult match_linear(const RouteTable& table, const BitString& descriptor,
                         const BitString& turns, const MatchOptions& options = {});

}  // namespace bsdloc
