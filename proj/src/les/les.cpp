#include "lesvote/les.hpp"

#include <algorithm>
#include <cmath>

#include "lesvote/error.hpp"
#include "lesvote/linalg.hpp"

namespace lesvote::les {

std::size_t StandardizedBlock::zeroed_rows() const noexcept {
  return static_cast<std::size_t>(std::count(zero_variance.begin(), zero_variance.end(), true));
}

StandardizedBlock standardize(const Matrix& block) {
  const std::size_t p = block.rows();
  const std::size_t n = block.cols();
  require(n >= 2, ErrorKind::insufficient_data,
          "standardize needs at least 2 columns, got " + std::to_string(n));

  StandardizedBlock out{Matrix(p, n), std::vector<double>(p), std::vector<double>(p),
                        std::vector<bool>(p, false)};
  for (std::size_t i = 0; i < p; ++i) {
    const auto row = block.row(i);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : row) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    out.row_means[i] = mean;
    out.row_stds[i] = sd;

    // Variance at round-off level relative to the row's magnitude counts as
    // constant.
    const double scale = std::max(std::abs(mean), sd);
    if (sd == 0.0 || sd <= 1e-13 * scale) {
      out.zero_variance[i] = true;
      continue;
    }
    auto dst = out.data.row(i);
    for (std::size_t t = 0; t < n; ++t) dst[t] = (row[t] - mean) / sd;
  }
  return out;
}

Matrix sample_covariance(const Matrix& x) {
  return gram_of_rows(x, static_cast<double>(x.cols()));
}

double von_neumann_entropy(std::span<const double> eigenvalues) noexcept {
  double h = 0.0;
  for (double lambda : eigenvalues) {
    if (lambda > 0.0) h -= lambda * std::log(lambda);
  }
  return h;
}

double les_entropy(const Matrix& m) {
  auto spectrum = sym_eig(m, false).eigenvalues;
  double norm = 0.0;
  for (double l : spectrum) norm = std::max(norm, std::abs(l));
  const double floor = -1e-10 * norm;
  for (double& l : spectrum) {
    if (l < floor) {
      fail(ErrorKind::not_psd, "covariance has eigenvalue " + std::to_string(l) +
                                   " below the PSD tolerance");
    }
    if (l < 0.0) l = 0.0;
  }
  return von_neumann_entropy(spectrum);
}

std::vector<double> FeatureVector::values() const {
  std::vector<double> v;
  v.reserve(features.size());
  for (const auto& f : features) v.push_back(f.value);
  return v;
}

std::size_t FeatureVector::blocks_with_zeroed_rows() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(features.begin(), features.end(), [](const LesFeature& f) { return f.zeroed_rows > 0; }));
}

LesFeature block_feature(const signal::SpectralBlock& block) {
  const auto standardized = standardize(block);
  LesFeature f;
  f.block_index = block.index;
  f.freq_lo = block.freq_lo;
  f.freq_hi = block.freq_hi;
  f.value = les_entropy(sample_covariance(standardized));
  f.zeroed_rows = standardized.zeroed_rows();
  return f;
}

FeatureVector extract_features(std::span<const signal::SpectralBlock> blocks) {
  require(!blocks.empty(), ErrorKind::insufficient_data, "no spectral blocks to featurize");
  const std::size_t channels = blocks.front().data.rows();
  FeatureVector out;
  out.features.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    try {
      require(blocks[i].data.rows() == channels, ErrorKind::shape,
              "inconsistent channel count across blocks");
      out.features.push_back(block_feature(blocks[i]));
    } catch (const Error& e) {
      throw Error(e.kind(), "block " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

FeatureVector recording_features(const signal::Recording& rec, const PipelineParams& params) {
  const auto filtered = signal::bandpass_filter(rec, params.band_low_hz, params.band_high_hz);
  const auto psd =
      signal::compute_psd(filtered, params.freq_start_hz, params.freq_end_hz, params.psd_cols);
  const auto split = signal::split_blocks(psd, params.block_width);
  return extract_features(split.blocks);
}

}  // namespace lesvote::les
