#include "lesvote/voting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lesvote/error.hpp"
#include "lesvote/simd/kernels.hpp"

namespace lesvote::voting {

std::vector<std::size_t> FeaturePartition::subset(std::size_t i) const {
  std::vector<std::size_t> idx(band_size(i));
  std::iota(idx.begin(), idx.end(), ranges[i].first);
  return idx;
}

std::vector<std::size_t> FeaturePartition::complement(std::size_t i) const {
  std::vector<std::size_t> idx;
  idx.reserve(n_features - band_size(i));
  for (std::size_t f = 0; f < n_features; ++f) {
    if (f < ranges[i].first || f >= ranges[i].second) idx.push_back(f);
  }
  return idx;
}

FeaturePartition partition_features(std::size_t n_features, std::size_t m) {
  require(m >= 2, ErrorKind::parameter, "partition needs at least 2 subsets");
  require(m <= n_features, ErrorKind::parameter,
          "cannot split " + std::to_string(n_features) + " features into " + std::to_string(m) +
              " subsets");
  FeaturePartition p;
  p.n_features = n_features;
  const std::size_t base = n_features / m;
  const std::size_t larger = n_features % m;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t size = base + (i < larger ? 1 : 0);
    p.ranges.emplace_back(begin, begin + size);
    begin += size;
  }
  return p;
}

FeaturePartition partition_features(const les::FeatureVector& layout, std::size_t m) {
  auto p = partition_features(layout.size(), m);
  for (const auto& [b, e] : p.ranges) {
    p.band_hz.emplace_back(layout.features[b].freq_lo, layout.features[e - 1].freq_hi);
  }
  return p;
}

LabelEncoding default_encoding(const std::vector<std::string>& class_names) {
  LabelEncoding enc;
  if (class_names.size() == 2) {
    enc.codes = {1.0, -1.0};
    return enc;
  }
  const std::vector<std::string> clinical{"HC", "CHR", "FES"};
  if (class_names.size() == 3 &&
      std::is_permutation(class_names.begin(), class_names.end(), clinical.begin())) {
    for (const auto& name : class_names) {
      enc.codes.push_back(static_cast<double>(
          std::find(clinical.begin(), clinical.end(), name) - clinical.begin()));
    }
    return enc;
  }
  for (std::size_t i = 0; i < class_names.size(); ++i) enc.codes.push_back(static_cast<double>(i));
  return enc;
}

WeakEnsemble train_weak_classifiers(const ml::LabeledDataset& data,
                                    const FeaturePartition& partition,
                                    const ml::ClassifierSpec& base) {
  require(data.dim() == partition.n_features, ErrorKind::shape,
          "dataset feature count does not match the partition");
  require(data.classes_present() >= 2, ErrorKind::degenerate_data,
          "weak classifiers need at least two classes in the training data");
  WeakEnsemble ens{partition, {}};
  ens.members.reserve(partition.m());
  for (std::size_t i = 0; i < partition.m(); ++i) {
    const auto cols = partition.complement(i);
    ens.members.push_back(ml::Classifier::train(data.columns(cols), base));
  }
  return ens;
}

LabelMatrix build_label_matrix(const WeakEnsemble& ensemble, const Matrix& samples,
                               const LabelEncoding& encoding) {
  const auto& part = ensemble.partition;
  require(samples.cols() == part.n_features, ErrorKind::shape,
          "samples have " + std::to_string(samples.cols()) + " features, partition expects " +
              std::to_string(part.n_features));
  LabelMatrix out{Matrix(samples.rows(), part.m())};
  for (std::size_t i = 0; i < part.m(); ++i) {
    const auto cols = part.complement(i);
    std::vector<double> sub(cols.size());
    for (std::size_t j = 0; j < samples.rows(); ++j) {
      const auto row = samples.row(j);
      for (std::size_t c = 0; c < cols.size(); ++c) sub[c] = row[cols[c]];
      out.entries(j, i) = encoding.code(ensemble.members[i].predict(sub));
    }
  }
  return out;
}

LabelMatrix out_of_fold_label_matrix(const ml::LabeledDataset& data,
                                     const FeaturePartition& partition,
                                     const ml::ClassifierSpec& base,
                                     const LabelEncoding& encoding, std::size_t folds,
                                     std::uint64_t seed) {
  require(folds >= 2, ErrorKind::parameter, "out-of-fold labelling needs at least 2 folds");
  require(data.size() >= folds, ErrorKind::insufficient_data, "fewer samples than folds");

  // Stratified assignment: shuffle each class, deal round-robin into folds.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold_of(data.size());
  std::size_t next = 0;
  for (int cls = 0; cls < static_cast<int>(data.num_classes()); ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t r = 0; r < data.size(); ++r)
      if (data.labels[r] == cls) members.push_back(r);
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t r : members) fold_of[r] = next++ % folds;
  }

  LabelMatrix out{Matrix(data.size(), partition.m())};
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t r = 0; r < data.size(); ++r) (fold_of[r] == f ? test_idx : train_idx).push_back(r);
    if (test_idx.empty()) continue;
    const auto ensemble = train_weak_classifiers(data.rows(train_idx), partition, base);
    const auto test = data.rows(test_idx);
    const auto block = build_label_matrix(ensemble, test.features, encoding);
    for (std::size_t t = 0; t < test_idx.size(); ++t)
      std::copy_n(block.entries.row(t).begin(), partition.m(), out.entries.row(test_idx[t]).begin());
  }
  return out;
}

const char* to_string(FitMethod method) noexcept {
  return method == FitMethod::constrained ? "constrained" : "unconstrained";
}

FitMethod fit_method_from_string(const std::string& name) {
  if (name == "constrained") return FitMethod::constrained;
  if (name == "unconstrained") return FitMethod::unconstrained;
  fail(ErrorKind::parameter, "unknown weight method '" + name + "'");
}

std::vector<double> redistribute(std::span<const double> w) {
  const std::size_t m = w.size();
  require(m >= 2, ErrorKind::parameter, "redistribution needs at least 2 weights");
  std::vector<double> W(m);
  const double denom = static_cast<double>(m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    double others = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) others += w[j];
    W[i] = others / denom;
  }
  return W;
}

std::vector<double> vote_scores(const LabelMatrix& labels, std::span<const double> w) {
  require(labels.entries.cols() == w.size(), ErrorKind::shape,
          "weight count does not match the label matrix");
  return labels.entries * w;
}

std::vector<double> encode_targets(std::span<const int> labels, const LabelEncoding& encoding) {
  std::vector<double> t;
  t.reserve(labels.size());
  for (int l : labels) t.push_back(encoding.code(l));
  return t;
}

namespace {

double residual_norm(const Matrix& l, std::span<const double> w, std::span<const double> target) {
  auto s = l * w;
  for (std::size_t j = 0; j < s.size(); ++j) s[j] -= target[j];
  return norm2(s);
}

}  // namespace

WeightVector fit_weights(const LabelMatrix& labels, std::span<const double> target,
                         FitMethod method, const qp::SolverOptions& options) {
  const Matrix& l = labels.entries;
  require(l.rows() == target.size(), ErrorKind::shape, "label matrix rows must match targets");
  require(l.cols() >= 2, ErrorKind::parameter, "need at least two weak classifiers");

  WeightVector out;
  out.method = method;
  auto fit_constrained = [&] {
    try {
      const auto sol = qp::solve_simplex_qp(qp::least_squares_problem(l, target), options);
      out.qp_iterations = sol.iterations;
      return sol.w;
    } catch (const Error& e) {
      throw Error(e.kind(), std::string("constrained fit: ") + e.what());
    }
  };

  if (method == FitMethod::unconstrained) {
    try {
      out.w = qp::solve_unconstrained(l, target);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::singular) {
        throw Error(e.kind(), std::string("unconstrained fit: ") + e.what());
      }
      out.fell_back = true;
      out.w = fit_constrained();
    }
  } else {
    out.w = fit_constrained();
  }
  out.W = redistribute(out.w);
  out.residual = residual_norm(l, out.w, target);
  return out;
}

nlohmann::json to_json(const WeightVector& weights, const FeaturePartition& partition) {
  nlohmann::json j;
  j["method"] = to_string(weights.method);
  j["m"] = weights.w.size();
  auto ranges = nlohmann::json::array();
  for (const auto& [lo, hi] : partition.band_hz) ranges.push_back({lo, hi});
  j["band_ranges_hz"] = ranges;
  j["w"] = weights.w;
  j["W"] = weights.W;
  j["residual"] = weights.residual;
  j["fell_back"] = weights.fell_back;
  return j;
}

WeightVector weight_vector_from_json(const nlohmann::json& j) {
  WeightVector out;
  try {
    out.method = fit_method_from_string(j.at("method").get<std::string>());
    out.w = j.at("w").get<std::vector<double>>();
    out.W = j.at("W").get<std::vector<double>>();
    out.residual = j.value("residual", 0.0);
    out.fell_back = j.value("fell_back", false);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parameter, std::string("weight vector: ") + e.what());
  }
  require(out.w.size() == out.W.size() && out.w.size() == j.value("m", out.w.size()),
          ErrorKind::shape, "weight vector lengths disagree");
  return out;
}

}  // namespace lesvote::voting
