#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "bsdloc/bit_string.hpp"

namespace bsdloc {

struct Candidate {
  std::uint32_t route = 0;
  int distance = 0;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Keeps every entry within the `tiers` smallest distinct distances seen so far.
class NearestCollector {
 public:
  explicit NearestCollector(int tiers = 1);

  /// Entries farther than this can be discarded.
  int bound() const { return bound_; }
  void offer(std::uint32_t route, int distance);
  /// Sorted by (distance, route).
  std::vector<Candidate> take();
  bool empty() const { return entries_.empty(); }

 private:
  void refresh();

  int tiers_;
  int bound_ = std::numeric_limits<int>::max();
  std::vector<int> levels_;
  std::vector<Candidate> entries_;
};

struct SearchStats {
  std::size_t nodes_visited = 0;
  std::size_t distance_evaluations = 0;
};

/// Burkhard-Keller tree over fixed-length bit strings under Hamming distance.
///
/// Identical descriptors share a node and are kept in that node's bucket.
/// Nodes, child links and descriptors live in flat arrays.
class BkTree {
 public:
  explicit BkTree(std::size_t bits);

  std::size_t bits() const { return bits_; }
  std::size_t size() const { return size_; }
  std::size_t node_count() const { return nodes_.size(); }
  bool empty() const { return size_ == 0; }

  /// Throws std::invalid_argument if the length differs from bits().
  void insert(const BitString& descriptor, std::uint32_t route);
  /// `descriptor` must hold words_for_bits(bits()) words with zero padding.
  void insert(std::span<const Word> descriptor, std::uint32_t route);

  /// Bucket size of the node holding exactly this descriptor, or 0.
  std::size_t bucket_size(const BitString& descriptor) const;

  /// All entries at the minimum distance (and the next tiers-1 distinct
  /// distances). Throws std::logic_error on an empty tree.
  std::vector<Candidate> nearest(const BitString& query, int tiers = 1,
                                 SearchStats* stats = nullptr) const;
  /// Adds to a shared collector so several trees can be searched under one bound.
  void search(std::span<const Word> query, NearestCollector& collector,
              SearchStats* stats = nullptr) const;
  /// Entries with distance <= radius, sorted by (distance, route).
  std::vector<Candidate> within(const BitString& query, int radius,
                                SearchStats* stats = nullptr) const;

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  struct Node {
    std::uint32_t first_child = kNone;
    std::uint32_t next_sibling = kNone;
    std::uint32_t route = 0;
    std::uint32_t extra = kNone;
    std::uint32_t key = 0;
  };

  std::span<const Word> words(std::uint32_t node) const {
    return {words_.data() + static_cast<std::size_t>(node) * stride_, stride_};
  }
  template <typename Visit>
  void each_route(std::uint32_t node, Visit&& visit) const;
  void check(const BitString& s) const;

  std::size_t bits_;
  std::size_t stride_;
  std::size_t size_ = 0;
  std::vector<Node> nodes_;
  std::vector<Word> words_;
  /// Extra bucket entries: (route, next).
  std::vector<std::pair<std::uint32_t, std::uint32_t>> bucket_;
};

/// Reference implementation: exhaustive scan over rows of `stride` words.
std::vector<Candidate> linear_nearest(std::span<const Word> rows, std::size_t stride,
                                      std::span<const Word> query, int tiers = 1);

}  // namespace bsdloc
