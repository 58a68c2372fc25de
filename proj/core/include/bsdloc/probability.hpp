#pragma once

#include <span>
#include <vector>

#include "bsdloc/bsd.hpp"

namespace bsdloc {

/// Per-bit detector accuracy q with 0 < q < 1.
struct LikelihoodModel {
  double q = 0.75;
  /// Throws std::invalid_argument unless 0 < q < 1.
  void validate() const;
};

/// log(q^(4N - H) (1 - q)^H).
double log_posterior_weight(int hamming, int route_length, const LikelihoodModel& model);
double posterior_weight(int hamming, int route_length, const LikelihoodModel& model);

/// log of ((1 - q) / q)^(H_i - H_j).
double log_likelihood_ratio(int hamming_i, int hamming_j, const LikelihoodModel& model);
double likelihood_ratio(int hamming_i, int hamming_j, const LikelihoodModel& model);

/// P(location | observed descriptor) under a uniform prior over locations.
std::vector<double> single_location_posterior(Bsd observed, std::span<const Bsd> table,
                                              const LikelihoodModel& model);

/// Normalized weights for candidates at the given Hamming distances of a common query.
std::vector<double> normalized_posterior(std::span<const int> distances, int route_length,
                                         const LikelihoodModel& model);

}  // namespace bsdloc
