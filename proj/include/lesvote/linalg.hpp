#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lesvote/matrix.hpp"

namespace lesvote {

/// Eigenvalues of a symmetric matrix sorted descending, with the matching
/// orthonormal eigenvectors stored column-wise when requested.
struct SymmetricSpectrum {
  std::vector<double> eigenvalues;
  std::optional<Matrix> eigenvectors;
};

/// Symmetric eigendecomposition (Householder tridiagonalisation followed by
/// implicit QL with Wilkinson-type shifts).
///
/// Throws ErrorKind::dimension for non-square input and ErrorKind::symmetry
/// when |a_ij - a_ji| exceeds 1e-10 relative to the largest entry.
SymmetricSpectrum sym_eig(const Matrix& a, bool need_vectors = false);

/// Solves Ax = b by LU with partial pivoting. Throws ErrorKind::singular when
/// a pivot falls below 1e-12 * max|A|.
std::vector<double> solve_linear(const Matrix& a, std::span<const double> b);

/// True when A is square and symmetric within rel_tol * max(1, max|A|).
bool is_symmetric(const Matrix& a, double rel_tol = 1e-10);

}  // namespace lesvote
