#include "bsdloc/probability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bsdloc {

void LikelihoodModel::validate() const {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("LikelihoodModel: q must lie in (0, 1)");
}

double log_posterior_weight(int hamming, int route_length, const LikelihoodModel& model) {
  model.validate();
  const int bits = 4 * route_length;
  if (route_length < 1 || hamming < 0 || hamming > bits) {
    throw std::invalid_argument("posterior_weight: need 0 <= H <= 4N, got H=" +
                                std::to_string(hamming) + " N=" + std::to_string(route_length));
  }
  return (bits - hamming) * std::log(model.q) + hamming * std::log1p(-model.q);
}

double posterior_weight(int hamming, int route_length, const LikelihoodModel& model) {
  return std::exp(log_posterior_weight(hamming, route_length, model));
}

double log_likelihood_ratio(int hamming_i, int hamming_j, const LikelihoodModel& model) {
  model.validate();
  return -(hamming_i - hamming_j) * std::log(model.q / (1.0 - model.q));
}

double likelihood_ratio(int hamming_i, int hamming_j, const LikelihoodModel& model) {
  return std::exp(log_likelihood_ratio(hamming_i, hamming_j, model));
}

std::vector<double> normalized_posterior(std::span<const int> distances, int route_length,
                                         const LikelihoodModel& model) {
  std::vector<double> logs;
  logs.reserve(distances.size());
  for (int h : distances) logs.push_back(log_posterior_weight(h, route_length, model));
  if (logs.empty()) return logs;
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (auto& l : logs) {
    l = std::exp(l - top);
    sum += l;
  }
  for (auto& l : logs) l /= sum;
  return logs;
}

std::vector<double> single_location_posterior(Bsd observed, std::span<const Bsd> table,
                                              const LikelihoodModel& model) {
  if (table.empty()) throw std::invalid_argument("single_location_posterior: empty table");
  std::vector<int> h;
  h.reserve(table.size());
  for (Bsd d : table) h.push_back(bsd_hamming(observed, d));
  return normalized_posterior(h, 1, model);
}

}  // namespace bsdloc
