#pragma once
// Independent reference implementations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "lesvote/matrix.hpp"

namespace oracle {

// Smallest value of ½wᵀHw + cᵀw over the simplex grid {w = k·step, Σw = 1}.
// Depth-first enumeration keeps g = H·w_partial so each leaf costs O(1).
class SimplexGrid {
 public:
  SimplexGrid(const lesvote::Matrix& h, std::vector<double> c, double step)
      : h_(h), c_(std::move(c)), m_(c_.size()), steps_(static_cast<int>(std::lround(1.0 / step))),
        step_(step) {}

  double minimum() {
    best_ = std::numeric_limits<double>::infinity();
    std::vector<double> g(m_, 0.0);
    descend(0, steps_, 0.0, g);
    return best_;
  }

 private:
  void descend(std::size_t d, int left, double val, std::vector<double>& g) {
    if (d + 1 == m_) {
      const double r = left * step_;
      best_ = std::min(best_, val + r * (c_[d] + g[d]) + 0.5 * h_(d, d) * r * r);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      const double x = k * step_;
      const double v = val + x * (c_[d] + g[d]) + 0.5 * h_(d, d) * x * x;
      if (x != 0.0)
        for (std::size_t i = d + 1; i < m_; ++i) g[i] += x * h_(i, d);
      descend(d + 1, left - k, v, g);
      if (x != 0.0)
        for (std::size_t i = d + 1; i < m_; ++i) g[i] -= x * h_(i, d);
    }
  }

  const lesvote::Matrix& h_;
  std::vector<double> c_;
  std::size_t m_;
  int steps_;
  double step_;
  double best_ = 0.0;
};

inline double simplex_grid_minimum(const lesvote::Matrix& h, const std::vector<double>& c,
                                   double step) {
  return SimplexGrid(h, c, step).minimum();
}

// Brute-force k-NN: full distance scan, ranking by (distance, index); vote
// ties go to the smaller summed distance, then the lower class.
inline int knn_scan(const lesvote::Matrix& train, const std::vector<int>& labels,
                    std::size_t num_classes, std::span<const double> q, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t r = 0; r < train.rows(); ++r) {
    double s = 0;
    for (std::size_t c = 0; c < train.cols(); ++c) s += (train(r, c) - q[c]) * (train(r, c) - q[c]);
    d.push_back({s, r});
  }
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> votes(num_classes, 0);
  std::vector<double> dist(num_classes, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const auto cls = static_cast<std::size_t>(labels[d[i].second]);
    ++votes[cls];
    dist[cls] += std::sqrt(d[i].first);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < num_classes; ++c)
    if (votes[c] > votes[best] || (votes[c] == votes[best] && dist[c] < dist[best])) best = c;
  return static_cast<int>(best);
}

}  // namespace oracle
