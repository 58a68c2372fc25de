#pragma once

#include <cstdint>
#include <optional>

#include "bsdloc/road_network.hpp"
#include "bsdloc/semantic_map.hpp"

namespace bsdloc {

/// Grid city with building strips along every block face.
///
/// Streets run along `rows` horizontal and `cols` vertical lines. Each street
/// segment gets a strip of lots on both sides; a lot is built with probability
/// `building_coverage`, and a gap is opened before a lot with probability
/// `gap_frequency`.
struct SyntheticCityParams {
  int rows = 5;
  int cols = 5;
  double block_size = 100.0;
  double building_coverage = 0.8;
  double gap_frequency = 0.3;
  std::uint64_t seed = 1;

  /// Street lines are displaced by up to this fraction of block_size.
  double line_jitter = 0.0;
  /// Street lines are rounded to multiples of this (0 disables).
  double grid_snap = 10.0;
  /// Fraction of street segments removed (connectivity is preserved).
  double street_drop = 0.0;
  double setback = 6.0;
  double building_depth = 14.0;
  double lot_min = 12.0;
  double lot_max = 30.0;
  double gap_min_width = 8.0;
  double gap_max_width = 20.0;
  /// Unset: each node keeps one randomly chosen corner quadrant open and
  /// builds the others up to the cross street. true/false: all open/closed.
  std::optional<bool> open_corners;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct SyntheticCity {
  SemanticMap map;
  RoadGraph graph;
};

/// Deterministic for a fixed seed.
SyntheticCity generate_synthetic_city(const SyntheticCityParams& params);

}  // namespace bsdloc
