#include <algorithm>
#include <cmath>
#include <limits>

#include "lesvote/classifiers.hpp"
#include "lesvote/error.hpp"
#include "lesvote/simd/kernels.hpp"

namespace lesvote::ml {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

// SMO on  min ½αᵀQα − eᵀα  s.t.  yᵀα = 0, 0 ≤ α ≤ C  with Q_ij = y_i y_j x_i·x_j.
BinarySvm BinarySvm::train(const Matrix& x, std::span<const int> signs, const SvmParams& params) {
  const std::size_t l = x.rows();
  require(signs.size() == l, ErrorKind::shape, "SVM label count mismatch");
  require(params.C > 0.0, ErrorKind::parameter, "SVM C must be positive");
  bool has_pos = false, has_neg = false;
  for (int s : signs) {
    require(s == 1 || s == -1, ErrorKind::value, "binary SVM labels must be +1 or -1");
    (s > 0 ? has_pos : has_neg) = true;
  }
  require(has_pos && has_neg, ErrorKind::degenerate_data, "binary SVM needs both classes");

  const double C = params.C;
  std::vector<double> y(l);
  for (std::size_t i = 0; i < l; ++i) y[i] = signs[i];

  Matrix q(l, l);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i; j < l; ++j) {
      const double v = y[i] * y[j] * simd::dot(x.row(i), x.row(j));
      q(i, j) = v;
      q(j, i) = v;
    }

  std::vector<double> alpha(l, 0.0);
  std::vector<double> grad(l, -1.0);
  auto is_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
  };
  auto is_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
  };

  std::size_t iter = 0;
  for (;; ++iter) {
    // i: maximal violator in I_up; j: second-order choice in I_low.
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = l;
    for (std::size_t t = 0; t < l; ++t) {
      if (is_up(t) && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    }
    double gmin = std::numeric_limits<double>::infinity();
    double best_gain = std::numeric_limits<double>::infinity();
    std::size_t j = l;
    for (std::size_t t = 0; t < l; ++t) {
      if (!is_low(t)) continue;
      const double v = -y[t] * grad[t];
      gmin = std::min(gmin, v);
      if (i == l) continue;
      const double b = gmax - v;
      if (b > 0) {
        double a = q(i, i) + q(t, t) - 2.0 * y[i] * y[t] * q(i, t);
        if (a <= 0) a = kTau;
        const double gain = -(b * b) / a;
        if (gain < best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }
    if (i == l || j == l || gmax - gmin < params.tol) break;
    if (iter >= params.max_iterations) {
      fail(ErrorKind::convergence, "SMO exceeded " + std::to_string(params.max_iterations) + " iterations");
    }

    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < l; ++t) grad[t] += q(t, i) * dai + q(t, j) * daj;
  }

  BinarySvm svm;
  svm.iterations_ = iter;
  svm.alphas_ = alpha;

  // Offset from free vectors, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < l; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  svm.bias_ = -rho;

  svm.w_.assign(x.cols(), 0.0);
  double obj = 0.0;
  for (std::size_t t = 0; t < l; ++t) {
    if (alpha[t] != 0.0) simd::axpy(alpha[t] * y[t], x.row(t), svm.w_);
    obj += alpha[t] * (grad[t] - 1.0);
  }
  svm.dual_objective_ = 0.5 * obj;
  return svm;
}

double BinarySvm::decision(std::span<const double> x) const {
  require(x.size() == w_.size(), ErrorKind::shape, "SVM query has the wrong feature count");
  return simd::dot(w_, x) + bias_;
}

double BinarySvm::margin() const {
  const double n = std::sqrt(simd::dot(w_, w_));
  return n > 0.0 ? 1.0 / n : std::numeric_limits<double>::infinity();
}

SvmModel SvmModel::train(const LabeledDataset& data, const SvmParams& params) {
  data.validate();
  require(data.classes_present() >= 2, ErrorKind::degenerate_data,
          "SVM training data must contain at least two classes");
  SvmModel m;
  m.num_classes_ = data.num_classes();
  Matrix x = data.features;
  if (params.standardize) {
    m.scaler_.emplace(data.features);
    x = m.scaler_->apply(data.features);
  }
  const auto k = static_cast<int>(data.num_classes());
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      std::vector<std::size_t> idx;
      std::vector<int> signs;
      for (std::size_t r = 0; r < data.size(); ++r) {
        if (data.labels[r] == a || data.labels[r] == b) {
          idx.push_back(r);
          signs.push_back(data.labels[r] == a ? 1 : -1);
        }
      }
      const bool both = std::find(signs.begin(), signs.end(), 1) != signs.end() &&
                        std::find(signs.begin(), signs.end(), -1) != signs.end();
      if (!both) continue;
      Matrix sub(idx.size(), x.cols());
      for (std::size_t r = 0; r < idx.size(); ++r)
        std::copy_n(x.row(idx[r]).begin(), x.cols(), sub.row(r).begin());
      m.machines_.push_back({a, b, BinarySvm::train(sub, signs, params)});
    }
  }
  return m;
}

int SvmModel::predict(std::span<const double> x) const {
  std::vector<double> z(x.begin(), x.end());
  if (scaler_) scaler_->apply(x, z);
  std::vector<std::size_t> votes(num_classes_, 0);
  for (const auto& pair : machines_) {
    ++votes[static_cast<std::size_t>(pair.machine.decision(z) > 0 ? pair.positive : pair.negative)];
  }
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

const char* to_string(ClassifierKind kind) noexcept {
  return kind == ClassifierKind::knn ? "knn" : "svm";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
  if (name == "knn") return ClassifierKind::knn;
  if (name == "svm") return ClassifierKind::svm;
  fail(ErrorKind::parameter, "unknown classifier '" + name + "' (expected knn or svm)");
}

Classifier Classifier::train(const LabeledDataset& data, const ClassifierSpec& spec) {
  require(data.classes_present() >= 2, ErrorKind::degenerate_data,
          "training data must contain at least two classes");
  if (spec.kind == ClassifierKind::knn) return Classifier(KnnModel::train(data, spec.knn));
  return Classifier(SvmModel::train(data, spec.svm));
}

int Classifier::predict(std::span<const double> x) const {
  return std::visit([&](const auto& m) { return m.predict(x); }, model_);
}

std::vector<int> Classifier::predict_rows(const Matrix& x) const {
  std::vector<int> out;
  out.reserve(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(predict(x.row(r)));
  return out;
}

}  // namespace lesvote::ml
