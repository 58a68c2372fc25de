#include "bsdloc/bk_tree.hpp"

#include <algorithm>

namespace bsdloc {

NearestCollector::NearestCollector(int tiers) : tiers_(tiers) {
  if (tiers < 1) throw std::invalid_argument("NearestCollector: tiers must be >= 1");
}

void NearestCollector::refresh() {
  bound_ = static_cast<int>(levels_.size()) < tiers_ ? std::numeric_limits<int>::max()
                                                    : levels_.back();
}

void NearestCollector::offer(std::uint32_t route, int distance) {
  if (distance > bound_) return;
  auto it = std::lower_bound(levels_.begin(), levels_.end(), distance);
  if (it == levels_.end() || *it != distance) {
    levels_.insert(it, distance);
    if (static_cast<int>(levels_.size()) > tiers_) {
      const int drop = levels_.back();
      levels_.pop_back();
      std::erase_if(entries_, [drop](const Candidate& c) { return c.distance >= drop; });
    }
    refresh();
  }
  entries_.push_back({route, distance});
}

std::vector<Candidate> NearestCollector::take() {
  std::sort(entries_.begin(), entries_.end(), [](const Candidate& a, const Candidate& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.route < b.route;
  });
  return std::move(entries_);
}

BkTree::BkTree(std::size_t bits) : bits_(bits), stride_(words_for_bits(bits)) {
  if (bits == 0) throw std::invalid_argument("BkTree: descriptor length must be positive");
}

void BkTree::check(const BitString& s) const {
  if (s.size() != bits_) {
    throw std::invalid_argument("BkTree: descriptor has " + std::to_string(s.size()) +
                                " bits, index holds " + std::to_string(bits_));
  }
}

void BkTree::insert(const BitString& descriptor, std::uint32_t route) {
  check(descriptor);
  insert(descriptor.words(), route);
}

void BkTree::insert(std::span<const Word> descriptor, std::uint32_t route) {
  if (descriptor.size() != stride_) throw std::invalid_argument("BkTree: descriptor word count");
  ++size_;
  auto add_node = [&](std::uint32_t key) {
    nodes_.push_back(Node{kNone, kNone, route, kNone, key});
    words_.insert(words_.end(), descriptor.begin(), descriptor.end());
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  };
  if (nodes_.empty()) {
    add_node(0);
    return;
  }
  std::uint32_t n = 0;
  while (true) {
    const auto d = static_cast<std::uint32_t>(hamming_words(descriptor, words(n)));
    if (d == 0) {
      bucket_.emplace_back(route, nodes_[n].extra);
      nodes_[n].extra = static_cast<std::uint32_t>(bucket_.size() - 1);
      return;
    }
    std::uint32_t c = nodes_[n].first_child;
    while (c != kNone && nodes_[c].key != d) c = nodes_[c].next_sibling;
    if (c == kNone) {
      const auto child = add_node(d);
      nodes_[child].next_sibling = nodes_[n].first_child;
      nodes_[n].first_child = child;
      return;
    }
    n = c;
  }
}

template <typename Visit>
void BkTree::each_route(std::uint32_t node, Visit&& visit) const {
  visit(nodes_[node].route);
  for (auto e = nodes_[node].extra; e != kNone; e = bucket_[e].second) visit(bucket_[e].first);
}

std::size_t BkTree::bucket_size(const BitString& descriptor) const {
  check(descriptor);
  if (nodes_.empty()) return 0;
  std::uint32_t n = 0;
  while (true) {
    const auto d = static_cast<std::uint32_t>(hamming_words(descriptor.words(), words(n)));
    if (d == 0) {
      std::size_t k = 0;
      each_route(n, [&](std::uint32_t) { ++k; });
      return k;
    }
    std::uint32_t c = nodes_[n].first_child;
    while (c != kNone && nodes_[c].key != d) c = nodes_[c].next_sibling;
    if (c == kNone) return 0;
    n = c;
  }
}

void BkTree::search(std::span<const Word> query, NearestCollector& collector,
                    SearchStats* stats) const {
  if (nodes_.empty()) return;
  if (query.size() != stride_) throw std::invalid_argument("BkTree: query word count");
  std::vector<std::uint32_t> stack = {0};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    const int d = hamming_words(query, words(n));
    if (stats) {
      ++stats->nodes_visited;
      ++stats->distance_evaluations;
    }
    if (d <= collector.bound()) each_route(n, [&](std::uint32_t r) { collector.offer(r, d); });
    const int bound = collector.bound();
    for (auto c = nodes_[n].first_child; c != kNone; c = nodes_[c].next_sibling) {
      const int k = static_cast<int>(nodes_[c].key);
      if (std::abs(k - d) <= bound) stack.push_back(c);
    }
  }
}

std::vector<Candidate> BkTree::nearest(const BitString& query, int tiers, SearchStats* stats) const {
  check(query);
  if (nodes_.empty()) throw std::logic_error("BkTree::nearest on an empty index");
  NearestCollector collector(tiers);
  search(query.words(), collector, stats);
  return collector.take();
}

std::vector<Candidate> BkTree::within(const BitString& query, int radius, SearchStats* stats) const {
  check(query);
  std::vector<Candidate> out;
  if (nodes_.empty()) return out;
  std::vector<std::uint32_t> stack = {0};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    const int d = hamming_words(query.words(), words(n));
    if (stats) {
      ++stats->nodes_visited;
      ++stats->distance_evaluations;
    }
    if (d <= radius) each_route(n, [&](std::uint32_t r) { out.push_back({r, d}); });
    for (auto c = nodes_[n].first_child; c != kNone; c = nodes_[c].next_sibling) {
      if (std::abs(static_cast<int>(nodes_[c].key) - d) <= radius) stack.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.route < b.route;
  });
  return out;
}

std::vector<Candidate> linear_nearest(std::span<const Word> rows, std::size_t stride,
                                      std::span<const Word> query, int tiers) {
  NearestCollector c(tiers);
  const std::size_t n = stride == 0 ? 0 : rows.size() / stride;
  for (std::size_t i = 0; i < n; ++i) {
    c.offer(static_cast<std::uint32_t>(i), hamming_words(query, rows.subspan(i * stride, stride)));
  }
  return c.take();
}

}  // namespace bsdloc
