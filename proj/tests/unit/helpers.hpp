#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "lesvote/matrix.hpp"

namespace testutil {

inline lesvote::Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng,
                                     double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  lesvote::Matrix m(r, c);
  for (auto& v : m.data()) v = g(rng);
  return m;
}

inline lesvote::Matrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
  auto a = random_matrix(n, n, rng);
  lesvote::Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

// Orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
inline lesvote::Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  auto q = random_matrix(n, n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double d = 0;
      for (std::size_t i = 0; i < n; ++i) d += q(i, j) * q(i, k);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= d * q(i, k);
    }
    double nrm = 0;
    for (std::size_t i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
  }
  return q;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace testutil
