#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lesvote/matrix.hpp"

namespace lesvote::ml {

/// Samples as rows of `features`; labels are indices into `class_names`.
struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> class_names;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return features.cols(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }

  /// Throws ErrorKind::shape / ErrorKind::value on inconsistent contents.
  void validate() const;

  LabeledDataset rows(std::span<const std::size_t> indices) const;
  LabeledDataset columns(std::span<const std::size_t> indices) const;

  /// Number of distinct labels that actually occur.
  std::size_t classes_present() const;
};

/// Column-wise z-scoring with statistics from the training set; constant
/// columns get unit scale.
class Standardizer {
 public:
  Standardizer() = default;
  explicit Standardizer(const Matrix& train);

  void apply(std::span<const double> in, std::span<double> out) const;
  Matrix apply(const Matrix& x) const;

  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& scales() const noexcept { return scales_; }

 private:
  std::vector<double> means_;
  std::vector<double> scales_;
};

struct KnnParams {
  std::size_t k = 5;
  bool standardize = true;
};

/// Brute-force k-nearest-neighbour vote under Euclidean distance. Neighbour
/// ties at equal distance go to the lower training index; class vote ties to
/// the smaller summed distance, then the lower class index.
class KnnModel {
 public:
  static KnnModel train(const LabeledDataset& data, const KnnParams& params = {});
  int predict(std::span<const double> x) const;

  std::size_t k() const noexcept { return k_; }

 private:
  std::size_t k_ = 1;
  std::size_t num_classes_ = 0;
  std::optional<Standardizer> scaler_;
  Matrix train_;
  std::vector<int> labels_;
};

struct SvmParams {
  double C = 1.0;
  double tol = 1e-6;
  std::size_t max_iterations = 1'000'000;
  bool standardize = true;
};

/// Linear soft-margin SVM for labels ±1, trained on the dual by SMO with
/// second-order working-set selection.
class BinarySvm {
 public:
  static BinarySvm train(const Matrix& x, std::span<const int> signs, const SvmParams& params);

  double decision(std::span<const double> x) const;

  const std::vector<double>& weights() const noexcept { return w_; }
  double bias() const noexcept { return bias_; }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  /// Dual objective ½αᵀQα − Σα at the solution (minimisation form).
  double dual_objective() const noexcept { return dual_objective_; }
  std::size_t iterations() const noexcept { return iterations_; }
  /// Geometric margin 1/‖w‖.
  double margin() const;

 private:
  std::vector<double> w_;
  double bias_ = 0.0;
  std::vector<double> alphas_;
  double dual_objective_ = 0.0;
  std::size_t iterations_ = 0;
};

/// Multiclass linear SVM: one binary machine per class pair (one-vs-one),
/// majority vote with ties to the lower class index.
class SvmModel {
 public:
  static SvmModel train(const LabeledDataset& data, const SvmParams& params = {});
  int predict(std::span<const double> x) const;

  struct Pair {
    int positive;
    int negative;
    BinarySvm machine;
  };
  const std::vector<Pair>& machines() const noexcept { return machines_; }

 private:
  std::size_t num_classes_ = 0;
  std::optional<Standardizer> scaler_;
  std::vector<Pair> machines_;
};

enum class ClassifierKind { knn, svm };

const char* to_string(ClassifierKind kind) noexcept;
ClassifierKind classifier_kind_from_string(const std::string& name);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::svm;
  KnnParams knn;
  SvmParams svm;
};

class Classifier {
 public:
  /// Throws ErrorKind::degenerate_data when fewer than two classes occur.
  static Classifier train(const LabeledDataset& data, const ClassifierSpec& spec);

  int predict(std::span<const double> x) const;
  std::vector<int> predict_rows(const Matrix& x) const;

 private:
  std::variant<KnnModel, SvmModel> model_;
  explicit Classifier(std::variant<KnnModel, SvmModel> m) : model_(std::move(m)) {}
};

/// counts(predicted, actual).
struct ConfusionMatrix {
  std::size_t num_classes = 0;
  std::vector<std::size_t> counts;

  std::size_t operator()(std::size_t predicted, std::size_t actual) const {
    return counts[predicted * num_classes + actual];
  }
  std::size_t total() const noexcept;
  std::size_t column_total(std::size_t actual) const;
};

struct Evaluation {
  double accuracy = 0.0;                   // percent
  std::optional<double> sensitivity;       // percent, two-class only
  std::optional<double> specificity;       // percent, two-class only
  ConfusionMatrix confusion;
};

/// Accuracy, and for two classes sensitivity TP/(TP+FN) and specificity
/// TN/(TN+FP) with `positive_class` as the positive label.
Evaluation evaluate(std::span<const int> predicted, std::span<const int> actual,
                    std::size_t num_classes, int positive_class = 0);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double mse = 0.0;     // mean squared deviation about the mean (n)
};

Summary summarize(std::span<const double> values);

}  // namespace lesvote::ml
