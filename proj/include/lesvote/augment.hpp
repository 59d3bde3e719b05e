#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "lesvote/matrix.hpp"
#include "lesvote/voting.hpp"

namespace lesvote::augment {

struct WeightLevels {
  std::vector<int> levels;         // 1..num_levels per band
  std::size_t num_levels = 5;
  std::vector<double> bin_edges;   // num_levels + 1 edges over [min W, max W]
};

/// Uniform bins over [min W, max W], left-closed with the top bin closed on
/// the right. All-equal weights map to level 1.
WeightLevels discretize(std::span<const double> W, std::size_t num_levels = 5);

struct Provenance {
  std::size_t band = 0;
  std::size_t feature = 0;  // index into the original vector
  std::size_t copy = 0;     // 0-based
};

struct AugmentedFeatureVector {
  std::vector<double> values;
  std::vector<Provenance> provenance;
};

/// Column layout of the augmented vector: original feature index per output
/// slot. Bands in order, each feature of band i repeated level_i times in a
/// row (a, a, b, b, ...).
std::vector<Provenance> augmented_layout(const voting::FeaturePartition& partition,
                                         const WeightLevels& levels);

AugmentedFeatureVector augment(std::span<const double> features,
                               const voting::FeaturePartition& partition,
                               const WeightLevels& levels);

/// Row-wise augmentation of a sample matrix.
Matrix augment_rows(const Matrix& samples, const voting::FeaturePartition& partition,
                    const WeightLevels& levels);

/// {num_levels, bin_edges, levels, band_ranges_hz}
nlohmann::json to_json(const WeightLevels& levels, const voting::FeaturePartition& partition);

}  // namespace lesvote::augment
