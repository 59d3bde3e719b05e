#include <algorithm>
#include <cmath>
#include <numeric>

#include "lesvote/classifiers.hpp"
#include "lesvote/error.hpp"
#include "lesvote/simd/kernels.hpp"

namespace lesvote::ml {

KnnModel KnnModel::train(const LabeledDataset& data, const KnnParams& params) {
  data.validate();
  require(data.size() >= 1, ErrorKind::insufficient_data, "KNN needs a non-empty training set");
  require(params.k >= 1 && params.k <= data.size(), ErrorKind::parameter,
          "KNN k must lie in [1, training size]");
  KnnModel m;
  m.k_ = params.k;
  m.num_classes_ = data.num_classes();
  m.labels_ = data.labels;
  if (params.standardize) {
    m.scaler_.emplace(data.features);
    m.train_ = m.scaler_->apply(data.features);
  } else {
    m.train_ = data.features;
  }
  return m;
}

int KnnModel::predict(std::span<const double> x) const {
  require(x.size() == train_.cols(), ErrorKind::shape, "query has the wrong feature count");
  std::vector<double> query(x.begin(), x.end());
  if (scaler_) scaler_->apply(x, query);

  const std::size_t n = train_.rows();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = simd::squared_distance(train_.row(i), query);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                    });

  std::vector<std::size_t> votes(num_classes_, 0);
  std::vector<double> summed(num_classes_, 0.0);
  for (std::size_t r = 0; r < k_; ++r) {
    const auto cls = static_cast<std::size_t>(labels_[order[r]]);
    ++votes[cls];
    summed[cls] += std::sqrt(dist[order[r]]);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < num_classes_; ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && votes[c] > 0 && summed[c] < summed[best])) {
      best = c;
    }
  }
  return static_cast<int>(best);
}

}  // namespace lesvote::ml
