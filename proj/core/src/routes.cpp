#include "bsdloc/routes.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "bsdloc/geo.hpp"
#include "bsdloc/map_data.hpp"

namespace bsdloc {

AdjacencyMatrix::AdjacencyMatrix(std::size_t n,
                                 std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs,
                                 std::vector<std::uint32_t> keys)
    : keys_(std::move(keys)) {
  if (!keys_.empty() && keys_.size() != n) {
    throw std::invalid_argument("AdjacencyMatrix: key count differs from node count");
  }
  for (const auto& [a, b] : arcs) {
    if (a >= n || b >= n) throw std::out_of_range("AdjacencyMatrix: arc endpoint out of range");
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  offsets_.assign(n + 1, 0);
  for (const auto& a : arcs) ++offsets_[a.first + 1];
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  targets_.reserve(arcs.size());
  for (const auto& a : arcs) targets_.push_back(a.second);
}

AdjacencyMatrix AdjacencyMatrix::undirected(
    std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
  arcs.reserve(edges.size() * 2);
  for (const auto& [a, b] : edges) {
    if (a == b) continue;
    arcs.emplace_back(a, b);
    arcs.emplace_back(b, a);
  }
  return AdjacencyMatrix(n, std::move(arcs));
}

bool AdjacencyMatrix::adjacent(std::uint32_t i, std::uint32_t j) const {
  if (i >= size() || j >= size()) return false;
  auto s = successors(i);
  return std::binary_search(s.begin(), s.end(), j);
}

std::uint32_t AdjacencyMatrix::key_bound() const {
  if (keys_.empty()) return static_cast<std::uint32_t>(size());
  std::uint32_t m = 0;
  for (auto k : keys_) m = std::max(m, k + 1);
  return m;
}

bool AdjacencyMatrix::symmetric() const {
  for (std::uint32_t i = 0; i < size(); ++i) {
    for (auto j : successors(i)) {
      if (!adjacent(j, i)) return false;
    }
  }
  return true;
}

AdjacencyMatrix build_adjacency(const SampledRoads& sampled) {
  return AdjacencyMatrix::undirected(sampled.places.size(), sampled.place_edges);
}

AdjacencyMatrix build_location_adjacency(const SampledRoads& sampled) {
  const std::size_t np = sampled.places.size();
  std::vector<std::vector<std::uint32_t>> nbr(np);
  for (const auto& [a, b] : sampled.place_edges) {
    nbr[a].push_back(b);
    nbr[b].push_back(a);
  }
  std::map<std::pair<PlaceId, PlaceId>, LocationId> arrival;
  std::vector<std::uint32_t> keys;
  keys.reserve(sampled.locations.size());
  for (const auto& l : sampled.locations) {
    keys.push_back(l.place);
    if (l.from_place != kNoPlace) arrival[{l.place, l.from_place}] = l.id;
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
  for (const auto& l : sampled.locations) {
    for (auto w : nbr[l.place]) {
      if (w == l.from_place) continue;
      auto it = arrival.find({w, l.place});
      if (it != arrival.end()) arcs.emplace_back(l.id, it->second);
    }
  }
  return AdjacencyMatrix(sampled.locations.size(), std::move(arcs), std::move(keys));
}

RouteEnumerator::RouteEnumerator(const AdjacencyMatrix& adjacency, std::size_t length,
                                 std::optional<std::size_t> limit)
    : adj_(&adjacency), length_(length), limit_(limit), used_(adjacency.key_bound(), 0) {
  if (length == 0) throw std::invalid_argument("enumerate_routes: length must be >= 1");
  path_.reserve(length);
  cursor_.reserve(length);
}

bool RouteEnumerator::advance() {
  while (true) {
    if (path_.empty()) {
      if (next_start_ >= adj_->size()) return false;
      const auto s = next_start_++;
      path_.push_back(s);
      cursor_.push_back(0);
      used_[adj_->key(s)] = 1;
      if (path_.size() == length_) return true;
      continue;
    }
    if (path_.size() == length_) {
      used_[adj_->key(path_.back())] = 0;
      path_.pop_back();
      cursor_.pop_back();
      continue;
    }
    auto succ = adj_->successors(path_.back());
    auto& c = cursor_.back();
    while (c < succ.size() && used_[adj_->key(succ[c])]) ++c;
    if (c == succ.size()) {
      used_[adj_->key(path_.back())] = 0;
      path_.pop_back();
      cursor_.pop_back();
      continue;
    }
    const auto n = succ[c++];
    path_.push_back(n);
    cursor_.push_back(0);
    used_[adj_->key(n)] = 1;
    if (path_.size() == length_) return true;
  }
}

bool RouteEnumerator::next(std::vector<std::uint32_t>& route) {
  if (done_) return false;
  if (!advance()) {
    done_ = true;
    return false;
  }
  if (limit_ && emitted_ == *limit_) {
    truncated_ = true;
    done_ = true;
    return false;
  }
  ++emitted_;
  route.assign(path_.begin(), path_.end());
  return true;
}

EnumerationResult enumerate_routes(const AdjacencyMatrix& adjacency, std::size_t length,
                                   std::optional<std::size_t> limit) {
  RouteEnumerator e(adjacency, length, limit);
  EnumerationResult out;
  std::vector<std::uint32_t> r;
  while (e.next(r)) out.routes.push_back(r);
  out.truncated = e.truncated();
  return out;
}

MissingBsdError::MissingBsdError(std::uint32_t location)
    : std::out_of_range("no BSD for location " + std::to_string(location)), location_(location) {}

void append_descriptor(BitString& out, Bsd d) { out.append_bits(d.bits(), 4); }

BitString route_descriptor(std::span<const std::uint32_t> route, std::span<const Bsd> bsd_table) {
  BitString out;
  for (auto id : route) {
    if (id >= bsd_table.size()) throw MissingBsdError(id);
    append_descriptor(out, bsd_table[id]);
  }
  return out;
}

bool turn_bit(double theta_i, double theta_j, double tau) {
  return smallest_angle_deg(theta_i, theta_j) >= tau;
}

BitString turn_pattern(std::span<const std::uint32_t> route, std::span<const double> headings,
                       double tau) {
  BitString out;
  for (std::size_t i = 0; i + 1 < route.size(); ++i) {
    if (route[i] >= headings.size() || route[i + 1] >= headings.size()) {
      throw std::out_of_range("turn_pattern: no heading for location " +
                              std::to_string(std::max(route[i], route[i + 1])));
    }
    out.push_back(turn_bit(headings[route[i]], headings[route[i + 1]], tau));
  }
  return out;
}

LocationGraph make_location_graph(const SampledRoads& sampled, std::vector<Bsd> bsd,
                                  double turn_threshold) {
  if (bsd.size() != sampled.locations.size()) {
    throw std::invalid_argument("make_location_graph: BSD table has " + std::to_string(bsd.size()) +
                                " entries for " + std::to_string(sampled.locations.size()) +
                                " locations");
  }
  LocationGraph g;
  g.adjacency = build_location_adjacency(sampled);
  g.fingerprint = map_fingerprint(sampled, bsd);
  g.bsd = std::move(bsd);
  g.place_count = sampled.places.size();
  g.turn_threshold = turn_threshold;
  for (const auto& l : sampled.locations) {
    g.heading.push_back(l.heading);
    g.place.push_back(l.place);
  }
  return g;
}

}  // namespace bsdloc
