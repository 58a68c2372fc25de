#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bsdloc/bit_string.hpp"
#include "bsdloc/bsd.hpp"
#include "bsdloc/road_network.hpp"

namespace bsdloc {

/// Sparse directed relation over nodes 0..n-1 in CSR form.
///
/// Each node may carry a key; routes never repeat a key. For place graphs the
/// key is the node itself, for directed-location graphs it is the place.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  AdjacencyMatrix(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs,
                  std::vector<std::uint32_t> keys = {});
  /// Adds both directions of every edge.
  static AdjacencyMatrix undirected(std::size_t n,
                                    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t arc_count() const { return targets_.size(); }
  /// Ascending.
  std::span<const std::uint32_t> successors(std::uint32_t i) const {
    return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
  }
  bool adjacent(std::uint32_t i, std::uint32_t j) const;
  std::uint32_t key(std::uint32_t i) const { return keys_.empty() ? i : keys_[i]; }
  std::uint32_t key_bound() const;
  bool symmetric() const;

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<std::uint32_t> keys_;
};

/// Undirected place adjacency: consecutive samples of a chain, which includes
/// samples meeting at a shared graph node.
AdjacencyMatrix build_adjacency(const SampledRoads& sampled);

/// Successor relation on directed locations: the arrival at v from u is
/// followed by the arrival at w from v for every neighbour w != u. Keys are places.
AdjacencyMatrix build_location_adjacency(const SampledRoads& sampled);

/// Streaming enumeration of simple paths of exactly `length` nodes.
///
/// Paths come out in lexicographic order of node ids and never repeat a key.
/// With a limit, enumeration stops after that many paths and truncated()
/// reports whether more existed.
class RouteEnumerator {
 public:
  RouteEnumerator(const AdjacencyMatrix& adjacency, std::size_t length,
                  std::optional<std::size_t> limit = std::nullopt);

  bool next(std::vector<std::uint32_t>& route);
  std::size_t emitted() const { return emitted_; }
  bool truncated() const { return truncated_; }

 private:
  bool advance();

  const AdjacencyMatrix* adj_;
  std::size_t length_;
  std::optional<std::size_t> limit_;
  std::vector<std::uint32_t> path_;
  std::vector<std::uint32_t> cursor_;
  std::vector<std::uint8_t> used_;
  std::uint32_t next_start_ = 0;
  std::size_t emitted_ = 0;
  bool truncated_ = false;
  bool done_ = false;
};

struct EnumerationResult {
  std::vector<std::vector<std::uint32_t>> routes;
  bool truncated = false;
};

/// Throws std::invalid_argument if length == 0.
EnumerationResult enumerate_routes(const AdjacencyMatrix& adjacency, std::size_t length,
                                   std::optional<std::size_t> limit = std::nullopt);

class MissingBsdError : public std::out_of_range {
 public:
  explicit MissingBsdError(std::uint32_t location);
  std::uint32_t location() const { return location_; }

 private:
  std::uint32_t location_;
};

BitString route_descriptor(std::span<const std::uint32_t> route, std::span<const Bsd> bsd_table);
void append_descriptor(BitString& out, Bsd d);

bool turn_bit(double theta_i, double theta_j, double tau = 60.0);
BitString turn_pattern(std::span<const std::uint32_t> route, std::span<const double> headings,
                       double tau = 60.0);

/// Directed-location graph with everything route construction needs.
struct LocationGraph {
  AdjacencyMatrix adjacency;
  std::vector<Bsd> bsd;
  std::vector<double> heading;
  std::vector<PlaceId> place;
  std::size_t place_count = 0;
  double turn_threshold = 60.0;
  std::uint64_t fingerprint = 0;

  std::size_t size() const { return bsd.size(); }
};

/// Throws std::invalid_argument if the table size differs from the location count.
LocationGraph make_location_graph(const SampledRoads& sampled, std::vector<Bsd> bsd,
                                  double turn_threshold = 60.0);

}  // namespace bsdloc
