#include "bsdloc/detector.hpp"

#include <charconv>
#include <sstream>

namespace bsdloc {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

bool valid_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

DetectorModel DetectorModel::symmetric(double q, std::uint64_t seed) {
  DetectorModel m;
  m.q_junc = q;
  m.q_gap = q;
  m.seed = seed;
  m.validate();
  return m;
}

void DetectorModel::validate() const {
  if (!valid_probability(q_junc) || !valid_probability(q_gap) ||
      (q_junc_absent && !valid_probability(*q_junc_absent)) ||
      (q_gap_absent && !valid_probability(*q_gap_absent))) {
    throw std::invalid_argument("DetectorModel: probabilities must lie in [0, 1]");
  }
}

double DetectorModel::accuracy(View view, bool true_bit) const {
  const bool junction = view == View::kFront || view == View::kBack;
  if (!true_bit) {
    if (junction && q_junc_absent) return *q_junc_absent;
    if (!junction && q_gap_absent) return *q_gap_absent;
  }
  return junction ? q_junc : q_gap;
}

double channel_uniform(std::uint64_t seed, DrawIndex index, unsigned bit) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ index.stream);
  h = splitmix(h ^ index.step);
  h = splitmix(h ^ bit);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

Bsd estimate_bsd(Bsd true_bsd, const DetectorModel& model, DrawIndex index) {
  Bsd out;
  for (View v : kAllViews) {
    const bool b = true_bsd.get(v);
    const bool keep = channel_uniform(model.seed, index, static_cast<unsigned>(v)) < model.accuracy(v, b);
    out.set(v, keep ? b : !b);
  }
  return out;
}

EstimateFormatError::EstimateFormatError(const std::string& what, std::size_t row)
    : std::runtime_error("estimates row " + std::to_string(row) + ": " + what), row_(row) {}

std::vector<Bsd> EstimateTable::dense(std::size_t location_count) const {
  std::vector<Bsd> out(location_count);
  for (LocationId id = 0; id < location_count; ++id) {
    auto it = estimates.find(id);
    if (it == estimates.end()) {
      throw std::runtime_error("no estimate for location " + std::to_string(id));
    }
    out[id] = it->second;
  }
  return out;
}

EstimateTable load_estimates(std::istream& csv, std::size_t location_count) {
  EstimateTable t;
  std::string line;
  std::size_t row = 0;
  bool any = false;
  while (std::getline(csv, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!any && line == kEstimatesHeader) {
      any = true;
      continue;
    }
    any = true;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) {
      throw EstimateFormatError("expected 5 columns, found " + std::to_string(cells.size()), row);
    }
    LocationId id = 0;
    auto [p, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), id);
    if (ec != std::errc() || p != cells[0].data() + cells[0].size()) {
      throw EstimateFormatError("bad location id '" + cells[0] + "'", row);
    }
    Bsd d;
    for (int b = 0; b < 4; ++b) {
      const auto& c = cells[b + 1];
      if (c != "0" && c != "1") throw EstimateFormatError("bit values must be 0 or 1", row);
      d.set(static_cast<View>(b), c == "1");
    }
    if (id >= location_count) {
      t.unknown.emplace_back(id, row);
      continue;
    }
    if (!t.estimates.emplace(id, d).second) {
      throw EstimateFormatError("duplicate location " + std::to_string(id), row);
    }
  }
  if (t.estimates.empty()) t.warnings.push_back("estimates file contains no rows");
  for (LocationId id = 0; id < location_count; ++id) {
    if (t.estimates.count(id) == 0) t.missing.push_back(id);
  }
  if (!t.unknown.empty()) {
    t.warnings.push_back(std::to_string(t.unknown.size()) + " rows reference unknown locations");
  }
  return t;
}

void write_estimates(std::ostream& csv, std::span<const Bsd> table) {
  csv << kEstimatesHeader << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    csv << i;
    for (View v : kAllViews) csv << ',' << (table[i].get(v) ? '1' : '0');
    csv << '\n';
  }
}

}  // namespace bsdloc
