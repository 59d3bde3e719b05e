#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lesvote/classifiers.hpp"
#include "lesvote/les.hpp"
#include "lesvote/matrix.hpp"
#include "lesvote/qp.hpp"

namespace lesvote::voting {

/// Contiguous split of the feature vector into m bands. Sizes differ by at
/// most one, larger bands first.
struct FeaturePartition {
  std::size_t n_features = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;  // [begin, end)
  std::vector<std::pair<double, double>> band_hz;           // empty if unknown

  std::size_t m() const noexcept { return ranges.size(); }
  std::size_t band_size(std::size_t i) const { return ranges.at(i).second - ranges.at(i).first; }
  std::vector<std::size_t> subset(std::size_t i) const;
  /// Every feature index outside band i.
  std::vector<std::size_t> complement(std::size_t i) const;
};

/// Throws ErrorKind::parameter unless 2 <= m <= n_features.
FeaturePartition partition_features(std::size_t n_features, std::size_t m);

/// Same partition with band frequency ranges taken from the block layout of
/// `layout` (first block's lower edge to last block's upper edge).
FeaturePartition partition_features(const les::FeatureVector& layout, std::size_t m);

/// Numeric code for each class index, used for the least-squares fit.
struct LabelEncoding {
  std::vector<double> codes;

  double code(int cls) const { return codes.at(static_cast<std::size_t>(cls)); }
};

/// Two classes: first +1, second -1. Three classes named HC/CHR/FES: ordinal
/// HC=0, CHR=1, FES=2. Otherwise ordinal by class index.
LabelEncoding default_encoding(const std::vector<std::string>& class_names);

/// k x m matrix of coded weak-classifier predictions (row = sample).
struct LabelMatrix {
  Matrix entries;
};

/// Classifier i trained on the complement of band i.
struct WeakEnsemble {
  FeaturePartition partition;
  std::vector<ml::Classifier> members;
};

WeakEnsemble train_weak_classifiers(const ml::LabeledDataset& data,
                                    const FeaturePartition& partition,
                                    const ml::ClassifierSpec& base);

/// Entry (j, i) is the code of member i's prediction for sample j.
LabelMatrix build_label_matrix(const WeakEnsemble& ensemble, const Matrix& samples,
                               const LabelEncoding& encoding);

/// Label matrix from out-of-fold predictions: the samples are split into
/// `folds` class-stratified folds (shuffled with `seed`); each fold is
/// predicted by weak classifiers trained on the remaining folds.
LabelMatrix out_of_fold_label_matrix(const ml::LabeledDataset& data,
                                     const FeaturePartition& partition,
                                     const ml::ClassifierSpec& base,
                                     const LabelEncoding& encoding, std::size_t folds,
                                     std::uint64_t seed);

enum class FitMethod { constrained, unconstrained };

const char* to_string(FitMethod method) noexcept;
FitMethod fit_method_from_string(const std::string& name);

struct WeightVector {
  FitMethod method = FitMethod::constrained;
  std::vector<double> w;  // per complement classifier
  std::vector<double> W;  // redistributed per band
  double residual = 0.0;  // ‖Lw − l*‖
  bool fell_back = false; // unconstrained fit was singular; constrained used
  std::size_t qp_iterations = 0;
};

/// W_i = Σ_{j≠i} w_j / (m − 1). Throws ErrorKind::parameter for m < 2.
std::vector<double> redistribute(std::span<const double> w);

/// S = L w.
std::vector<double> vote_scores(const LabelMatrix& labels, std::span<const double> w);

/// Fits w by the chosen method and redistributes it. A singular unconstrained
/// system falls back to the constrained solver with `fell_back` set.
WeightVector fit_weights(const LabelMatrix& labels, std::span<const double> target,
                         FitMethod method, const qp::SolverOptions& options = {});

/// Coded true labels l*.
std::vector<double> encode_targets(std::span<const int> labels, const LabelEncoding& encoding);

/// {method, m, band_ranges_hz, w, W, residual, fell_back}
nlohmann::json to_json(const WeightVector& weights, const FeaturePartition& partition);
WeightVector weight_vector_from_json(const nlohmann::json& j);

}  // namespace lesvote::voting
