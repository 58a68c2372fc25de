#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "bsdloc/matcher.hpp"

namespace bsdloc {

enum class SessionStatus { kBootstrapping, kLocalized, kLost };
std::string_view to_string(SessionStatus status);

struct SessionConfig {
  double overlap_threshold = 0.8;
  int streak = 5;
  std::size_t max_length = 40;
  MatchMode mode = MatchMode::kBsdAndTurns;
  /// Require every pair among the last `streak` routes to overlap, not just successive ones.
  bool mutual_overlap = false;
  std::size_t max_reported = 4096;

  void validate() const;
};

/// Top route of one step as seen by the consistency criterion.
struct ConsistencyEntry {
  std::vector<PlaceId> places;
  bool unique = false;
};

/// Shared places over the shorter route's length.
double route_overlap(std::span<const PlaceId> a, std::span<const PlaceId> b);

/// True iff the last `streak` entries all had a unique best match and each
/// overlaps the previous one by at least `threshold` (every pair when `mutual`).
bool consistency_check(std::span<const ConsistencyEntry> history, double threshold = 0.8,
                       int streak = 5, bool mutual = false);

struct StepRecord {
  std::size_t step = 0;
  std::size_t query_length = 0;
  SessionStatus status = SessionStatus::kBootstrapping;
  MatchStatus match_status = MatchStatus::kOk;
  std::optional<RouteRef> top;
  int distance = 0;
  std::size_t tie_count = 0;
  bool unique = false;
  /// Tied step whose routes all agree with the previous top; skipped by the criterion.
  bool neutral = false;
  PlaceId current_place = kNoPlace;
};

struct StepOutcome {
  SessionStatus status = SessionStatus::kBootstrapping;
  MatchResult match;
  std::optional<RouteRef> top;
  /// Set on the step that declares localization and on every tracking step.
  std::optional<RouteRef> localized_route;
};

class SessionLostError : public std::logic_error {
 public:
  SessionLostError() : std::logic_error("session is lost; call reset() before new observations") {}
};

/// Bootstrapping, consistency-based localization and fixed-window tracking
/// for one stream of observations. Not thread-safe; many sessions may share a matcher.
class LocalizationSession {
 public:
  LocalizationSession(const RouteMatcher& matcher, SessionConfig config = {});

  /// `turn` is the turn bit between the previous and this observation; it is
  /// required after the first observation and ignored on the first.
  StepOutcome step(Bsd observed, std::optional<bool> turn);
  /// Clears observations and history and starts bootstrapping again.
  void reset();

  const RouteMatcher& matcher() const { return *matcher_; }
  SessionStatus status() const { return status_; }
  const SessionConfig& config() const { return config_; }
  const std::vector<StepRecord>& history() const { return history_; }
  std::size_t window_length() const { return window_; }
  std::size_t query_length() const { return obs_.size(); }
  std::optional<RouteRef> top() const { return top_; }
  std::optional<PlaceId> current_place() const;

  static void write_log_header(std::ostream& out);
  void write_log(std::ostream& out) const;

 private:
  const RouteMatcher* matcher_;
  SessionConfig config_;
  SessionStatus status_ = SessionStatus::kBootstrapping;
  std::deque<Bsd> obs_;
  std::deque<bool> turns_;
  std::vector<StepRecord> history_;
  std::deque<ConsistencyEntry> recent_;
  std::optional<RouteRef> top_;
  std::vector<PlaceId> top_places_;
  std::size_t window_ = 0;
  std::size_t steps_ = 0;
};

}  // namespace bsdloc
