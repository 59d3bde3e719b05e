#include "lesvote/augment.hpp"

#include <algorithm>
#include <cmath>

#include "lesvote/error.hpp"

namespace lesvote::augment {

WeightLevels discretize(std::span<const double> W, std::size_t num_levels) {
  require(!W.empty(), ErrorKind::parameter, "discretize needs at least one weight");
  require(num_levels >= 1, ErrorKind::parameter, "num_levels must be at least 1");
  for (double v : W) require(std::isfinite(v), ErrorKind::value, "non-finite weight");

  const auto [lo_it, hi_it] = std::minmax_element(W.begin(), W.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double span = hi - lo;
  const double n = static_cast<double>(num_levels);

  WeightLevels out;
  out.num_levels = num_levels;
  out.bin_edges.resize(num_levels + 1);
  for (std::size_t i = 0; i <= num_levels; ++i) out.bin_edges[i] = lo + static_cast<double>(i) * span / n;
  out.bin_edges.back() = hi;

  out.levels.reserve(W.size());
  for (double v : W) {
    if (span <= 0.0) {
      out.levels.push_back(1);
      continue;
    }
    const auto bin = static_cast<std::size_t>(std::floor((v - lo) / span * n));
    out.levels.push_back(static_cast<int>(std::min(bin, num_levels - 1)) + 1);
  }
  return out;
}

std::vector<Provenance> augmented_layout(const voting::FeaturePartition& partition,
                                         const WeightLevels& levels) {
  require(levels.levels.size() == partition.m(), ErrorKind::shape,
          "level count " + std::to_string(levels.levels.size()) + " does not match " +
              std::to_string(partition.m()) + " bands");
  std::vector<Provenance> layout;
  for (std::size_t b = 0; b < partition.m(); ++b) {
    const int level = levels.levels[b];
    require(level >= 1, ErrorKind::value, "levels must be at least 1");
    for (std::size_t f = partition.ranges[b].first; f < partition.ranges[b].second; ++f)
      for (int c = 0; c < level; ++c) layout.push_back({b, f, static_cast<std::size_t>(c)});
  }
  return layout;
}

AugmentedFeatureVector augment(std::span<const double> features,
                               const voting::FeaturePartition& partition,
                               const WeightLevels& levels) {
  require(features.size() == partition.n_features, ErrorKind::shape,
          "feature length does not match the partition");
  AugmentedFeatureVector out;
  out.provenance = augmented_layout(partition, levels);
  out.values.reserve(out.provenance.size());
  for (const auto& p : out.provenance) out.values.push_back(features[p.feature]);
  return out;
}

Matrix augment_rows(const Matrix& samples, const voting::FeaturePartition& partition,
                    const WeightLevels& levels) {
  require(samples.cols() == partition.n_features, ErrorKind::shape,
          "feature length does not match the partition");
  const auto layout = augmented_layout(partition, levels);
  Matrix out(samples.rows(), layout.size());
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    const auto src = samples.row(r);
    auto dst = out.row(r);
    for (std::size_t c = 0; c < layout.size(); ++c) dst[c] = src[layout[c].feature];
  }
  return out;
}

nlohmann::json to_json(const WeightLevels& levels, const voting::FeaturePartition& partition) {
  nlohmann::json j;
  j["num_levels"] = levels.num_levels;
  j["bin_edges"] = levels.bin_edges;
  j["levels"] = levels.levels;
  auto ranges = nlohmann::json::array();
  for (const auto& [lo, hi] : partition.band_hz) ranges.push_back({lo, hi});
  j["band_ranges_hz"] = ranges;
  return j;
}

}  // namespace lesvote::augment
