#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lesvote/matrix.hpp"
#include "lesvote/signal.hpp"

namespace lesvote::les {

/// Block with each row shifted to zero mean and scaled to unit sample
/// variance (divisor n - 1). Rows with zero variance are left all-zero and
/// flagged in `zero_variance`.
struct StandardizedBlock {
  Matrix data;
  std::vector<double> row_means;
  std::vector<double> row_stds;
  std::vector<bool> zero_variance;

  std::size_t zeroed_rows() const noexcept;
};

StandardizedBlock standardize(const Matrix& block);
inline StandardizedBlock standardize(const signal::SpectralBlock& block) {
  return standardize(block.data);
}

/// M = (1/n) X Xᵀ for a p x n matrix taken as given.
Matrix sample_covariance(const Matrix& x);
inline Matrix sample_covariance(const StandardizedBlock& block) {
  return sample_covariance(block.data);
}

/// Sum of -λ ln λ over the spectrum, with 0 ln 0 = 0.
double von_neumann_entropy(std::span<const double> eigenvalues) noexcept;

/// Von Neumann entropy of a symmetric PSD matrix. Eigenvalues in
/// [-1e-10 ‖M‖, 0) are clamped to zero; anything more negative raises
/// ErrorKind::not_psd.
double les_entropy(const Matrix& m);

struct LesFeature {
  std::size_t block_index = 0;
  double freq_lo = 0.0;
  double freq_hi = 0.0;
  double value = 0.0;
  std::size_t zeroed_rows = 0;
};

/// One LES value per spectral block, ordered by block index.
struct FeatureVector {
  std::vector<LesFeature> features;

  std::size_t size() const noexcept { return features.size(); }
  std::vector<double> values() const;
  std::size_t blocks_with_zeroed_rows() const noexcept;
};

/// LES feature of a single block: standardize, covariance, entropy.
LesFeature block_feature(const signal::SpectralBlock& block);

/// Features for every block in order. Block-level failures are rethrown with
/// the block index in the message.
FeatureVector extract_features(std::span<const signal::SpectralBlock> blocks);

/// Preprocessing constants for the full recording -> features path.
struct PipelineParams {
  double band_low_hz = 0.5;
  double band_high_hz = 50.0;
  double freq_start_hz = 0.5;
  double freq_end_hz = 50.0;
  std::size_t psd_cols = 14200;
  std::size_t block_width = 100;

  std::size_t num_blocks() const noexcept { return psd_cols / block_width; }
};

/// bandpass_filter -> compute_psd -> split_blocks -> extract_features.
FeatureVector recording_features(const signal::Recording& rec, const PipelineParams& params);

}  // namespace lesvote::les
