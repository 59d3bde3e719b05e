#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lesvote {

/// Dense row-major matrix of doubles.
///
/// Constructors that take caller data reject non-finite entries and empty
/// shapes; element access afterwards is unchecked.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::vector<double> column(std::size_t c) const;

  Matrix transpose() const;

  /// Columns [first, first + count) as a new matrix.
  Matrix column_slice(std::size_t first, std::size_t count) const;

  /// Max-abs entry norm.
  double max_abs() const noexcept;
  double frobenius_norm() const noexcept;
  double trace() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Aᵀx without forming the transpose.
std::vector<double> transpose_times(const Matrix& a, std::span<const double> x);

/// AᵀA (Gram matrix of the columns).
Matrix gram_of_columns(const Matrix& a);

/// (1/divisor) · X Xᵀ, the row Gram matrix used for sample covariances.
Matrix gram_of_rows(const Matrix& x, double divisor = 1.0);

double norm2(std::span<const double> x) noexcept;

}  // namespace lesvote
