#include <algorithm>
#include <cmath>
#include <set>

#include "lesvote/classifiers.hpp"
#include "lesvote/error.hpp"

namespace lesvote::ml {

void LabeledDataset::validate() const {
  require(features.rows() == labels.size(), ErrorKind::shape,
          "dataset has " + std::to_string(features.rows()) + " feature rows but " +
              std::to_string(labels.size()) + " labels");
  for (int l : labels) {
    require(l >= 0 && static_cast<std::size_t>(l) < class_names.size(), ErrorKind::value,
            "label " + std::to_string(l) + " outside the class list");
  }
  for (double v : features.data()) require(std::isfinite(v), ErrorKind::value, "non-finite feature");
}

LabeledDataset LabeledDataset::rows(std::span<const std::size_t> indices) const {
  require(!indices.empty(), ErrorKind::shape, "empty row selection");
  LabeledDataset out{Matrix(indices.size(), dim()), {}, class_names};
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    require(indices[r] < size(), ErrorKind::shape, "row index out of range");
    std::copy_n(features.row(indices[r]).begin(), dim(), out.features.row(r).begin());
    out.labels.push_back(labels[indices[r]]);
  }
  return out;
}

LabeledDataset LabeledDataset::columns(std::span<const std::size_t> indices) const {
  require(!indices.empty(), ErrorKind::shape, "empty feature selection");
  LabeledDataset out{Matrix(size(), indices.size()), labels, class_names};
  for (std::size_t r = 0; r < size(); ++r) {
    const auto src = features.row(r);
    auto dst = out.features.row(r);
    for (std::size_t c = 0; c < indices.size(); ++c) {
      require(indices[c] < dim(), ErrorKind::shape, "feature index out of range");
      dst[c] = src[indices[c]];
    }
  }
  return out;
}

std::size_t LabeledDataset::classes_present() const {
  return std::set<int>(labels.begin(), labels.end()).size();
}

Standardizer::Standardizer(const Matrix& train) {
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();
  means_.assign(d, 0.0);
  scales_.assign(d, 1.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) means_[c] += train(r, c);
  for (double& m : means_) m /= static_cast<double>(n);
  std::vector<double> ss(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) ss[c] += (train(r, c) - means_[c]) * (train(r, c) - means_[c]);
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(ss[c] / static_cast<double>(n));
    const double mag = std::abs(means_[c]);
    scales_[c] = (sd > 1e-12 * std::max(mag, 1e-300)) ? sd : 1.0;
  }
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
  require(in.size() == means_.size() && out.size() == means_.size(), ErrorKind::shape,
          "standardizer feature count mismatch");
  for (std::size_t c = 0; c < in.size(); ++c) out[c] = (in[c] - means_[c]) / scales_[c];
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) apply(x.row(r), out.row(r));
  return out;
}

}  // namespace lesvote::ml
