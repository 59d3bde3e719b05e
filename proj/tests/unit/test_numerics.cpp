#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "lesvote/error.hpp"
#include "lesvote/linalg.hpp"

using namespace lesvote;

namespace {

// det(A - lambda I) by Gaussian elimination with partial pivoting.
double char_poly(const Matrix& a, double lambda) {
  const std::size_t n = a.rows();
  std::vector<double> m(a.data().begin(), a.data().end());
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] -= lambda;
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r * n + c]) > std::abs(m[p * n + c])) p = r;
    if (m[p * n + c] == 0.0) return 0.0;
    if (p != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(m[p * n + k], m[c * n + k]);
      det = -det;
    }
    det *= m[c * n + c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r * n + c] / m[c * n + c];
      for (std::size_t k = c; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
    }
  }
  return det;
}

// Roots of the characteristic polynomial: scan a Gershgorin interval for sign
// changes, then bisect. Assumes simple eigenvalues.
std::vector<double> char_poly_roots(const Matrix& a) {
  const std::size_t n = a.rows();
  double lo = 0, hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r += std::abs(a(i, j));
    lo = std::min(lo, a(i, i) - r);
    hi = std::max(hi, a(i, i) + r);
  }
  std::vector<double> roots;
  const int steps = 200000;
  double x0 = lo - 1e-9, f0 = char_poly(a, x0);
  for (int s = 1; s <= steps; ++s) {
    const double x1 = lo + (hi - lo) * s / steps + 1e-9;
    const double f1 = char_poly(a, x1);
    if ((f0 < 0) != (f1 < 0)) {
      double l = x0, h = x1, fl = f0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (l + h);
        const double fm = char_poly(a, mid);
        if ((fm < 0) == (fl < 0)) {
          l = mid;
          fl = fm;
        } else {
          h = mid;
        }
      }
      roots.push_back(0.5 * (l + h));
    }
    x0 = x1;
    f0 = f1;
  }
  std::sort(roots.rbegin(), roots.rend());
  return roots;
}

}  // namespace

TEST_CASE("matrix constructors validate shape and finiteness") {
  CHECK_THROWS_AS(Matrix(0, 3), Error);
  CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), Error);
  CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::nan("")}), Error);
  CHECK_THROWS_AS(Matrix({{1.0, 2.0}, {3.0}}), Error);
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 6);
  CHECK(m.transpose()(2, 1) == 6);
  CHECK(m.column_slice(1, 2) == Matrix{{2, 3}, {5, 6}});
}

TEST_CASE("matrix products agree with double loops") {
  std::mt19937_64 rng(3);
  const auto a = testutil::random_matrix(5, 7, rng);
  const auto b = testutil::random_matrix(7, 4, rng);
  const auto c = a * b;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < 7; ++k) s += a(i, k) * b(k, j);
      CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-12));
    }
  const auto x = testutil::random_vector(5, rng);
  const auto atx = transpose_times(a, x);
  const auto ref = a.transpose() * std::span<const double>(x);
  CHECK(testutil::max_abs_diff(atx, ref) < 1e-12);
  const auto g = gram_of_columns(a);
  const auto gref = a.transpose() * a;
  CHECK((g.data().size() == gref.data().size()));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.data()[i] == doctest::Approx(gref.data()[i]));
}

TEST_CASE("sym_eig small cases") {
  auto s = sym_eig(Matrix::identity(3));
  CHECK(s.eigenvalues == std::vector<double>{1, 1, 1});
  s = sym_eig(Matrix{{2, 0}, {0, 3}});
  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(3));
  CHECK(s.eigenvalues[1] == doctest::Approx(2));
  CHECK_FALSE(s.eigenvectors.has_value());
}

TEST_CASE("sym_eig errors") {
  try {
    sym_eig(Matrix(2, 3));
    FAIL("expected dimension error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::dimension);
  }
  try {
    sym_eig(Matrix{{1, 2}, {2.1, 1}});
    FAIL("expected symmetry error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::symmetry);
  }
}

TEST_CASE("sym_eig matches characteristic polynomial roots on random 5x5") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 5; ++t) {
    const auto a = testutil::random_symmetric(5, rng);
    const auto roots = char_poly_roots(a);
    REQUIRE(roots.size() == 5);
    const auto s = sym_eig(a);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(s.eigenvalues[i] - roots[i]) < 1e-8);
  }
}

TEST_CASE("sym_eig reconstruction, orthonormality, trace and PSD properties") {
  std::mt19937_64 rng(12);
  for (std::size_t n : {1u, 2u, 7u, 24u, 64u}) {
    const auto a = testutil::random_symmetric(n, rng);
    const auto s = sym_eig(a, true);
    REQUIRE(s.eigenvectors.has_value());
    const auto& v = *s.eigenvectors;
    CHECK(std::is_sorted(s.eigenvalues.rbegin(), s.eigenvalues.rend()));
    double tr = 0;
    for (double l : s.eigenvalues) tr += l;
    CHECK(std::abs(tr - a.trace()) <= 1e-8 * std::max(1.0, std::abs(a.trace())));
    const auto vtv = v.transpose() * v;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(vtv(i, j) - (i == j ? 1.0 : 0.0)) < 1e-8);
    Matrix rec(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) rec(i, j) += v(i, k) * s.eigenvalues[k] * v(j, k);
    double err = 0;
    for (std::size_t i = 0; i < rec.size(); ++i)
      err = std::max(err, std::abs(rec.data()[i] - a.data()[i]));
    CHECK(err <= 1e-8 * a.frobenius_norm());

    const auto b = testutil::random_matrix(n, n / 2 + 1, rng);
    const auto p = gram_of_rows(b);
    for (double l : sym_eig(p).eigenvalues) CHECK(l >= -1e-10 * p.max_abs());
  }
}

TEST_CASE("solve_linear examples and residual bound") {
  CHECK(solve_linear(Matrix::identity(2), std::vector<double>{3, 4}) == std::vector<double>{3, 4});
  const auto x = solve_linear(Matrix{{2, 0}, {0, 4}}, std::vector<double>{2, 8});
  CHECK(x[0] == doctest::Approx(1));
  CHECK(x[1] == doctest::Approx(2));

  std::mt19937_64 rng(13);
  for (int t = 0; t < 1000; ++t) {
    auto a = testutil::random_matrix(6, 6, rng);
    for (std::size_t i = 0; i < 6; ++i) a(i, i) += 6.0;  // diagonally dominated, well conditioned
    const auto b = testutil::random_vector(6, rng);
    const auto sol = solve_linear(a, b);
    const auto ax = a * std::span<const double>(sol);
    std::vector<double> r(6);
    for (std::size_t i = 0; i < 6; ++i) r[i] = ax[i] - b[i];
    CHECK(norm2(r) <= 1e-8 * (a.frobenius_norm() * norm2(sol) + norm2(b)));
  }
}

TEST_CASE("solve_linear reports singular systems") {
  try {
    solve_linear(Matrix{{1, 2}, {2, 4}}, std::vector<double>{1, 2});
    FAIL("expected singular");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular);
  }
}

TEST_CASE("StageError tags the stage") {
  const StageError e("weights", Error(ErrorKind::singular, "boom"));
  CHECK(std::string(e.what()) == "[weights] boom");
  CHECK(e.kind() == ErrorKind::singular);
  CHECK(e.stage() == "weights");
}
