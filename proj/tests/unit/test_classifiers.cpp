#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "lesvote/classifiers.hpp"
#include "lesvote/error.hpp"
#include "lesvote/qp.hpp"
#include "oracles.hpp"

using namespace lesvote;
using namespace lesvote::ml;

namespace {

LabeledDataset dataset(Matrix x, std::vector<int> y, std::size_t classes = 2) {
  LabeledDataset d;
  d.features = std::move(x);
  d.labels = std::move(y);
  for (std::size_t c = 0; c < classes; ++c) d.class_names.push_back("c" + std::to_string(c));
  return d;
}

// Separable 2-D set: points pushed at least `gap` away from a random line.
LabeledDataset separable(std::size_t n, std::mt19937_64& rng, double gap = 0.3) {
  std::normal_distribution<double> g(0, 1);
  const double a = g(rng), b = g(rng), c = 0.3 * g(rng);
  const double nrm = std::hypot(a, b);
  Matrix x(n, 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double px, py, s;
    do {
      px = 2 * g(rng);
      py = 2 * g(rng);
      s = (a * px + b * py + c) / nrm;
    } while (std::abs(s) < gap);
    x(i, 0) = px;
    x(i, 1) = py;
    y[i] = s > 0 ? 0 : 1;
  }
  return dataset(x, y);
}

// Exact margin from the box-constrained dual solved by the active-set QP.
double dual_margin(const LabeledDataset& d, double C, double* objective) {
  const std::size_t n = d.size();
  qp::BoundedQp q;
  q.hessian = Matrix(n, n);
  std::vector<double> sign(n);
  for (std::size_t i = 0; i < n; ++i) sign[i] = d.labels[i] == 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0;
      for (std::size_t k = 0; k < d.dim(); ++k) dot += d.features(i, k) * d.features(j, k);
      q.hessian(i, j) = sign[i] * sign[j] * dot;
    }
  q.linear.assign(n, -1.0);
  q.eq_coeffs = sign;
  q.eq_rhs = 0.0;
  q.lower.assign(n, 0.0);
  q.upper.assign(n, C);
  const auto s = qp::solve_bounded_qp(q, std::vector<double>(n, 0.0));
  *objective = s.objective;
  std::vector<double> w(d.dim(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d.dim(); ++k) w[k] += s.w[i] * sign[i] * d.features(i, k);
  return 1.0 / norm2(w);
}

}  // namespace

TEST_CASE("knn examples") {
  const auto d = dataset(Matrix{{0}, {10}}, {0, 1});
  const auto m = KnnModel::train(d, {1, false});
  CHECK(m.predict(std::vector<double>{1}) == 0);
  CHECK(m.predict(std::vector<double>{9}) == 1);

  const auto d3 = dataset(Matrix{{0}, {1}, {2}, {100}}, {0, 0, 1, 1});
  CHECK(KnnModel::train(d3, {3, false}).predict(std::vector<double>{1.2}) == 0);
  // 2-NN split vote: the class with the smaller summed distance wins.
  CHECK(KnnModel::train(d3, {2, false}).predict(std::vector<double>{1.6}) == 1);
  CHECK_THROWS_AS(KnnModel::train(d3, {5, false}), Error);
  CHECK_THROWS_AS(KnnModel::train(d3, {0, false}), Error);
}

TEST_CASE("knn agrees with a brute-force scan") {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> cls(0, 2);
  for (int t = 0; t < 20; ++t) {
    const auto x = testutil::random_matrix(25, 4, rng);
    std::vector<int> y(25);
    for (auto& v : y) v = cls(rng);
    const auto d = dataset(x, y, 3);
    for (std::size_t k : {1u, 3u, 5u}) {
      const auto m = KnnModel::train(d, {k, false});
      for (int q = 0; q < 10; ++q) {
        const auto query = testutil::random_vector(4, rng);
        CHECK(m.predict(query) == oracle::knn_scan(x, y, 3, query, k));
      }
    }
  }
}

TEST_CASE("knn is invariant to a consistent feature permutation") {
  std::mt19937_64 rng(72);
  const auto x = testutil::random_matrix(30, 5, rng);
  std::vector<int> y(30);
  for (std::size_t i = 0; i < 30; ++i) y[i] = x(i, 0) + x(i, 2) > 0 ? 1 : 0;
  const std::size_t perm[] = {3, 1, 4, 0, 2};
  Matrix xp(30, 5);
  for (std::size_t r = 0; r < 30; ++r)
    for (std::size_t c = 0; c < 5; ++c) xp(r, c) = x(r, perm[c]);
  const auto a = KnnModel::train(dataset(x, y), {});
  const auto b = KnnModel::train(dataset(xp, y), {});
  for (int q = 0; q < 50; ++q) {
    const auto v = testutil::random_vector(5, rng);
    std::vector<double> vp(5);
    for (std::size_t c = 0; c < 5; ++c) vp[c] = v[perm[c]];
    CHECK(a.predict(v) == b.predict(vp));
  }
}

TEST_CASE("svm two points and XOR") {
  const auto two = BinarySvm::train(Matrix{{-1}, {1}}, std::vector<int>{-1, 1}, {1.0, 1e-6, 100000, false});
  CHECK(two.decision(std::vector<double>{0.0}) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(two.decision(std::vector<double>{1.0}) > 0);
  CHECK(two.decision(std::vector<double>{-1.0}) < 0);

  const auto xor_set = dataset(Matrix{{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {0, 0, 1, 1});
  const auto m = SvmModel::train(xor_set, {1.0, 1e-6, 100000, false});
  int correct = 0;
  for (std::size_t i = 0; i < 4; ++i) correct += m.predict(xor_set.features.row(i)) == xor_set.labels[i];
  CHECK(correct >= 2);
  CHECK(correct <= 3);
}

TEST_CASE("svm margin and dual objective match the exact dual") {
  std::mt19937_64 rng(73);
  for (int t = 0; t < 10; ++t) {
    const auto d = separable(20, rng);
    const double C = 1000.0;
    std::vector<int> signs;
    for (int l : d.labels) signs.push_back(l == 0 ? 1 : -1);
    const auto svm = BinarySvm::train(d.features, signs, {C, 1e-8, 1000000, false});
    double obj = 0;
    const double ref = dual_margin(d, C, &obj);
    CHECK(std::abs(svm.margin() - ref) < 1e-4);
    CHECK(std::abs(svm.dual_objective() - obj) <= 1e-6 * std::abs(obj));
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(svm.decision(d.features.row(i)) * signs[i] > 0);
  }
}

TEST_CASE("svm labels survive feature scaling with C rescaled") {
  std::mt19937_64 rng(74);
  const auto d = separable(40, rng, 0.05);
  std::vector<int> signs;
  for (int l : d.labels) signs.push_back(l == 0 ? 1 : -1);
  const double s = 4.0;
  Matrix xs = d.features;
  for (auto& v : xs.data()) v *= s;
  const auto a = BinarySvm::train(d.features, signs, {1.0, 1e-9, 1000000, false});
  const auto b = BinarySvm::train(xs, signs, {1.0 / (s * s), 1e-9, 1000000, false});
  for (int q = 0; q < 100; ++q) {
    const auto v = testutil::random_vector(2, rng, 2.0);
    const std::vector<double> vs{s * v[0], s * v[1]};
    const double da = a.decision(v);
    if (std::abs(da) > 1e-3) CHECK((da > 0) == (b.decision(vs) > 0));
  }
}

TEST_CASE("multiclass svm trains one machine per pair") {
  std::mt19937_64 rng(75);
  Matrix x(60, 2);
  std::vector<int> y(60);
  const double cx[] = {0, 6, 0}, cy[] = {0, 0, 6};
  std::normal_distribution<double> g(0, 0.5);
  for (std::size_t i = 0; i < 60; ++i) {
    y[i] = static_cast<int>(i % 3);
    x(i, 0) = cx[y[i]] + g(rng);
    x(i, 1) = cy[y[i]] + g(rng);
  }
  const auto d = dataset(x, y, 3);
  const auto m = SvmModel::train(d);
  CHECK(m.machines().size() == 3);
  for (std::size_t i = 0; i < 60; ++i) CHECK(m.predict(x.row(i)) == y[i]);
}

TEST_CASE("classifier facade rejects single-class data") {
  const auto d = dataset(Matrix{{0}, {1}}, {1, 1});
  try {
    Classifier::train(d, {});
    FAIL("expected degenerate data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_data);
  }
  CHECK(classifier_kind_from_string("knn") == ClassifierKind::knn);
  CHECK_THROWS_AS(classifier_kind_from_string("lda"), Error);
}

TEST_CASE("evaluate examples") {
  const std::vector<int> y{0, 1, 0, 1};
  auto e = evaluate(y, y, 2, 0);
  CHECK(e.accuracy == 100.0);
  CHECK(*e.sensitivity == 100.0);
  CHECK(*e.specificity == 100.0);

  // Class 0 positive: TP=9, FN=1, TN=8, FP=2.
  std::vector<int> pred, act;
  auto add = [&](int p, int a, int n) {
    for (int i = 0; i < n; ++i) {
      pred.push_back(p);
      act.push_back(a);
    }
  };
  add(0, 0, 9);
  add(1, 0, 1);
  add(1, 1, 8);
  add(0, 1, 2);
  e = evaluate(pred, act, 2, 0);
  CHECK(*e.sensitivity == doctest::Approx(90));
  CHECK(*e.specificity == doctest::Approx(80));
  CHECK(e.accuracy == doctest::Approx(85));
  CHECK(e.confusion(1, 0) == 1);
  CHECK(e.confusion.column_total(0) == 10);
  CHECK(e.confusion.total() == 20);

  // Reference row format: 97.50 / 98.50 / 96.50 over 200 test samples.
  pred.clear();
  act.clear();
  add(0, 0, 197);
  add(1, 0, 3);
  add(1, 1, 193);
  add(0, 1, 7);
  e = evaluate(pred, act, 2, 0);
  CHECK(e.accuracy == doctest::Approx(97.5));
  CHECK(*e.sensitivity == doctest::Approx(98.5));
  CHECK(*e.specificity == doctest::Approx(96.5));

  CHECK_THROWS_AS(evaluate(std::vector<int>{0}, y, 2, 0), Error);
  const auto three = evaluate(std::vector<int>{0, 1, 2, 2}, std::vector<int>{0, 1, 2, 1}, 3, 0);
  CHECK_FALSE(three.sensitivity.has_value());
  CHECK(three.accuracy == 75.0);
  std::size_t diag = 0;
  for (std::size_t c = 0; c < 3; ++c) diag += three.confusion(c, c);
  CHECK(100.0 * diag / three.confusion.total() == three.accuracy);
}

TEST_CASE("summary statistics") {
  const auto s = summarize(std::vector<double>{90, 95, 100});
  CHECK(s.mean == doctest::Approx(95));
  CHECK(s.stddev == doctest::Approx(5));
  CHECK(s.mse == doctest::Approx(50.0 / 3));
}
