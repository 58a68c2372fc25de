#include "bsdloc/session.hpp"

#include <algorithm>
#include <string>

namespace bsdloc {

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::kBootstrapping: return "bootstrapping";
    case SessionStatus::kLocalized: return "localized";
    case SessionStatus::kLost: return "lost";
  }
  return "?";
}

void SessionConfig::validate() const {
  if (!(overlap_threshold >= 0.0 && overlap_threshold <= 1.0)) {
    throw std::invalid_argument("SessionConfig: overlap_threshold must lie in [0, 1]");
  }
  if (streak < 1) throw std::invalid_argument("SessionConfig: streak must be >= 1");
  if (max_length < 1) throw std::invalid_argument("SessionConfig: max_length must be >= 1");
  if (max_reported < 1) throw std::invalid_argument("SessionConfig: max_reported must be >= 1");
}

double route_overlap(std::span<const PlaceId> a, std::span<const PlaceId> b) {
  const std::size_t shorter = std::min(a.size(), b.size());
  if (shorter == 0) return 0.0;
  std::vector<PlaceId> sa(a.begin(), a.end());
  std::vector<PlaceId> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::vector<PlaceId> common;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(shorter);
}

bool consistency_check(std::span<const ConsistencyEntry> history, double threshold, int streak,
                       bool mutual) {
  if (streak < 1 || history.size() < static_cast<std::size_t>(streak)) return false;
  auto last = history.last(static_cast<std::size_t>(streak));
  for (const auto& e : last) {
    if (!e.unique) return false;
  }
  for (std::size_t i = 1; i < last.size(); ++i) {
    const std::size_t from = mutual ? 0 : i - 1;
    for (std::size_t j = from; j < i; ++j) {
      if (route_overlap(last[j].places, last[i].places) < threshold) return false;
    }
  }
  return true;
}

LocalizationSession::LocalizationSession(const RouteMatcher& matcher, SessionConfig config)
    : matcher_(&matcher), config_(config) {
  config_.validate();
  config_.max_length = std::min(config_.max_length, matcher.database().max_length());
}

void LocalizationSession::reset() {
  status_ = SessionStatus::kBootstrapping;
  obs_.clear();
  turns_.clear();
  history_.clear();
  recent_.clear();
  top_.reset();
  top_places_.clear();
  window_ = 0;
  steps_ = 0;
}

std::optional<PlaceId> LocalizationSession::current_place() const {
  if (top_places_.empty()) return std::nullopt;
  return top_places_.back();
}

StepOutcome LocalizationSession::step(Bsd observed, std::optional<bool> turn) {
  if (status_ == SessionStatus::kLost) throw SessionLostError();
  if (!obs_.empty() && !turn.has_value()) {
    throw std::invalid_argument("step: a turn bit is required after the first observation");
  }
  if (!obs_.empty()) turns_.push_back(*turn);
  obs_.push_back(observed);
  const std::size_t cap = status_ == SessionStatus::kLocalized ? window_ : config_.max_length;
  while (obs_.size() > cap) {
    obs_.pop_front();
    turns_.pop_front();
  }
  ++steps_;

  BitString desc;
  for (Bsd b : obs_) append_descriptor(desc, b);
  BitString turns;
  for (bool t : turns_) turns.push_back(t);

  MatchOptions opts;
  opts.mode = config_.mode;
  opts.max_reported = config_.max_reported;
  StepOutcome out;
  out.match = matcher_->match(desc, turns, opts);
  const MatchResult& m = out.match;

  StepRecord rec;
  rec.step = steps_;
  rec.query_length = obs_.size();
  rec.match_status = m.status;
  rec.tie_count = m.tie_count;

  if (m.status != MatchStatus::kOk || m.ranked.empty()) {
    status_ = SessionStatus::kLost;
    rec.status = status_;
    history_.push_back(rec);
    out.status = status_;
    return out;
  }

  const auto length = static_cast<std::uint32_t>(obs_.size());
  const RouteDatabase& db = matcher_->database();
  const std::size_t reported_ties =
      std::min<std::size_t>(m.tie_count, static_cast<std::size_t>(std::count_if(
                                             m.ranked.begin(), m.ranked.end(),
                                             [&](const Candidate& c) { return c.distance == m.best_distance; })));
  const bool all_reported = reported_ties == m.tie_count;

  std::uint32_t best = m.ranked.front().route;
  std::vector<PlaceId> best_places = db.route_places({length, best});
  std::vector<std::vector<PlaceId>> tied_places;
  if (m.tie_count > 1) {
    tied_places.reserve(reported_ties);
    double best_overlap = top_places_.empty() ? 0.0 : route_overlap(best_places, top_places_);
    for (std::size_t i = 0; i < reported_ties; ++i) {
      tied_places.push_back(db.route_places({length, m.ranked[i].route}));
      if (i == 0 || top_places_.empty()) continue;
      const double ov = route_overlap(tied_places.back(), top_places_);
      if (ov > best_overlap) {
        best_overlap = ov;
        best = m.ranked[i].route;
        best_places = tied_places.back();
      }
    }
  }

  bool unique = m.tie_count == 1;
  if (!unique && all_reported) {
    unique = std::all_of(tied_places.begin(), tied_places.end(),
                         [&](const auto& p) { return p == best_places; });
  }
  bool neutral = false;
  if (!unique && all_reported && !top_places_.empty()) {
    neutral = std::all_of(tied_places.begin(), tied_places.end(), [&](const auto& p) {
      return route_overlap(p, top_places_) >= config_.overlap_threshold;
    });
  }

  top_ = RouteRef{length, best};
  top_places_ = std::move(best_places);
  out.top = top_;

  if (status_ == SessionStatus::kBootstrapping) {
    if (!neutral) {
      recent_.push_back({top_places_, unique});
      while (recent_.size() > static_cast<std::size_t>(config_.streak)) recent_.pop_front();
      std::vector<ConsistencyEntry> window(recent_.begin(), recent_.end());
      if (consistency_check(window, config_.overlap_threshold, config_.streak,
                            config_.mutual_overlap)) {
        status_ = SessionStatus::kLocalized;
        window_ = std::min(obs_.size(), config_.max_length);
      }
    }
  }
  if (status_ == SessionStatus::kLocalized) out.localized_route = top_;

  rec.status = status_;
  rec.top = top_;
  rec.distance = m.best_distance;
  rec.unique = unique;
  rec.neutral = neutral;
  rec.current_place = top_places_.back();
  history_.push_back(rec);
  out.status = status_;
  return out;
}

void LocalizationSession::write_log_header(std::ostream& out) {
  out << "step,query_length,status,best_route,distance,tie_count,unique,current_place\n";
}

void LocalizationSession::write_log(std::ostream& out) const {
  for (const auto& r : history_) {
    out << r.step << ',' << r.query_length << ',' << to_string(r.status) << ',';
    if (r.top) out << r.top->index;
    out << ',' << r.distance << ',' << r.tie_count << ',' << (r.unique ? 1 : 0) << ',';
    if (r.current_place != kNoPlace) out << r.current_place;
    out << '\n';
  }
}

}  // namespace bsdloc
