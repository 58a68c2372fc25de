#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsdloc/bsd.hpp"
#include "bsdloc/semantic_map.hpp"

namespace bsdloc {

/// Per-bit noisy channel standing in for feature classifiers.
///
/// A junction bit is reported correctly with probability q_junc and a gap bit
/// with q_gap. Setting the *_absent fields makes the channel asymmetric: they
/// then give the accuracy when the true bit is 0.
struct DetectorModel {
  double q_junc = 0.75;
  double q_gap = 0.75;
  std::uint64_t seed = 0;
  std::optional<double> q_junc_absent;
  std::optional<double> q_gap_absent;

  static DetectorModel symmetric(double q, std::uint64_t seed);
  /// Throws std::invalid_argument unless every probability lies in [0, 1].
  void validate() const;
  double accuracy(View view, bool true_bit) const;
};

/// Identifies one draw: independent streams (one per simulated route) and
/// steps within a stream.
struct DrawIndex {
  std::uint64_t stream = 0;
  std::uint64_t step = 0;
};

/// Uniform [0, 1) value determined only by (seed, stream, step, bit).
double channel_uniform(std::uint64_t seed, DrawIndex index, unsigned bit);

Bsd estimate_bsd(Bsd true_bsd, const DetectorModel& model, DrawIndex index);

class EstimateFormatError : public std::runtime_error {
 public:
  EstimateFormatError(const std::string& what, std::size_t row);
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

struct EstimateTable {
  std::map<LocationId, Bsd> estimates;
  /// Ids in [0, location_count) without a row.
  std::vector<LocationId> missing;
  /// Ids >= location_count, with their row numbers.
  std::vector<std::pair<LocationId, std::size_t>> unknown;
  std::vector<std::string> warnings;

  bool complete() const { return missing.empty(); }
  /// Dense table; throws std::runtime_error naming the first missing location.
  std::vector<Bsd> dense(std::size_t location_count) const;
};

inline constexpr const char* kEstimatesHeader =
    "location_id,junction_front,junction_back,gap_left,gap_right";

/// Reads the estimates CSV; the header row is optional. Row numbers are 1-based
/// file lines.
EstimateTable load_estimates(std::istream& csv, std::size_t location_count);
void write_estimates(std::ostream& csv, std::span<const Bsd> table);

}  // namespace bsdloc
