#include "bsdloc/matcher.hpp"

#include <chrono>
#include <stdexcept>
#include <string>

namespace bsdloc {

std::string_view to_string(MatchMode mode) {
  switch (mode) {
    case MatchMode::kBsdAndTurns: return "bsd+turns";
    case MatchMode::kBsdOnly: return "bsd_only";
    case MatchMode::kTurnsOnly: return "turns_only";
  }
  return "?";
}

MatchMode parse_match_mode(std::string_view text) {
  if (text == "bsd+turns" || text == "bsd_turns") return MatchMode::kBsdAndTurns;
  if (text == "bsd_only" || text == "bsd") return MatchMode::kBsdOnly;
  if (text == "turns_only" || text == "turns") return MatchMode::kTurnsOnly;
  throw std::invalid_argument("unknown match mode: " + std::string(text));
}

LengthIndex::LengthIndex(const RouteTable& table)
    : length_(table.length), route_count_(table.size()) {
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint32_t i = 0; i < table.size(); ++i) {
    BitString pattern = table.turns.to_bit_string(i);
    auto [it, fresh] = by_pattern_.try_emplace(std::move(pattern),
                                               static_cast<std::uint32_t>(partitions_.size()));
    if (fresh) partitions_.push_back({{}, BkTree(4 * length_)});
    Partition& p = partitions_[it->second];
    p.routes.push_back(i);
    p.tree.insert(table.descriptors.row(i), i);
  }
  build_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const LengthIndex::Partition* LengthIndex::partition(const BitString& turns) const {
  auto it = by_pattern_.find(turns);
  return it == by_pattern_.end() ? nullptr : &partitions_[it->second];
}

RouteMatcher::RouteMatcher(const RouteDatabase& db) : db_(&db) {
  for (std::size_t i = 0; i < db.max_length(); ++i) slots_.push_back(std::make_unique<Slot>());
}

const LengthIndex& RouteMatcher::index(std::size_t length) const {
  if (length == 0 || length > slots_.size()) {
    throw std::out_of_range("no route index for length " + std::to_string(length));
  }
  Slot& s = *slots_[length - 1];
  std::call_once(s.once, [&] { s.index = std::make_unique<LengthIndex>(db_->table(length)); });
  return *s.index;
}

namespace {

std::size_t check_query(const BitString& descriptor, const BitString& turns) {
  if (descriptor.empty() || descriptor.size() % 4 != 0) {
    throw std::invalid_argument("match: descriptor length must be a positive multiple of 4");
  }
  const std::size_t length = descriptor.size() / 4;
  if (turns.size() != length - 1) {
    throw std::invalid_argument("match: turn pattern has " + std::to_string(turns.size()) +
                                " bits, expected " + std::to_string(length - 1));
  }
  return length;
}

void finish(MatchResult& r, std::vector<Candidate> all, std::size_t cap) {
  if (all.empty()) return;
  r.best_distance = all.front().distance;
  std::size_t ties = 0;
  while (ties < all.size() && all[ties].distance == r.best_distance) ++ties;
  r.tie_count = ties;
  r.unique_best = ties == 1;
  if (all.size() > cap) all.resize(cap);
  r.ranked = std::move(all);
}

}  // namespace

MatchResult RouteMatcher::match(const BitString& descriptor, const BitString& turns,
                                const MatchOptions& options) const {
  const std::size_t length = check_query(descriptor, turns);
  MatchResult r;
  r.length = length;
  if (length > slots_.size()) {
    throw std::invalid_argument("match: length " + std::to_string(length) +
                                " exceeds the database maximum " + std::to_string(slots_.size()));
  }
  const LengthIndex& idx = index(length);
  if (idx.route_count() == 0) {
    r.status = MatchStatus::kNoRoutes;
    return r;
  }
  switch (options.mode) {
    case MatchMode::kBsdAndTurns: {
      const auto* p = idx.partition(turns);
      if (p == nullptr) {
        r.status = MatchStatus::kTurnFilterEmpty;
        return r;
      }
      r.candidates = p->routes.size();
      NearestCollector c(options.tiers);
      p->tree.search(descriptor.words(), c);
      finish(r, c.take(), options.max_reported);
      break;
    }
    case MatchMode::kBsdOnly: {
      r.candidates = idx.route_count();
      NearestCollector c(options.tiers);
      for (const auto& p : idx.partitions()) p.tree.search(descriptor.words(), c);
      finish(r, c.take(), options.max_reported);
      break;
    }
    case MatchMode::kTurnsOnly: {
      const auto* p = idx.partition(turns);
      if (p == nullptr) {
        r.status = MatchStatus::kTurnFilterEmpty;
        return r;
      }
      r.candidates = p->routes.size();
      std::vector<Candidate> all;
      all.reserve(std::min(p->routes.size(), options.max_reported));
      for (std::size_t i = 0; i < p->routes.size() && i < options.max_reported; ++i) {
        all.push_back({p->routes[i], 0});
      }
      finish(r, std::move(all), options.max_reported);
      r.tie_count = p->routes.size();
      r.unique_best = r.tie_count == 1;
      break;
    }
  }
  return r;
}

MatchResult match_linear(const RouteTable& table, const BitString& descriptor,
                         const BitString& turns, const MatchOptions& options) {
  const std::size_t length = check_query(descriptor, turns);
  MatchResult r;
  r.length = length;
  if (table.length != length) throw std::invalid_argument("match_linear: table length differs");
  if (table.size() == 0) {
    r.status = MatchStatus::kNoRoutes;
    return r;
  }
  NearestCollector c(options.mode == MatchMode::kTurnsOnly ? 1 : options.tiers);
  for (std::uint32_t i = 0; i < table.size(); ++i) {
    if (options.mode != MatchMode::kBsdOnly && table.turns.to_bit_string(i) != turns) continue;
    ++r.candidates;
    const int d = options.mode == MatchMode::kTurnsOnly
                      ? 0
                      : hamming_words(descriptor.words(), table.descriptors.row(i));
    c.offer(i, d);
  }
  if (r.candidates == 0) {
    r.status = MatchStatus::kTurnFilterEmpty;
    return r;
  }
  finish(r, c.take(), options.max_reported);
  return r;
}

}  // namespace bsdloc
