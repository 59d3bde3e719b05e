#include "lesvote/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lesvote/error.hpp"
#include "lesvote/simd/kernels.hpp"

namespace lesvote {

namespace {

void check_shape(std::size_t rows, std::size_t cols) {
  require(rows >= 1 && cols >= 1, ErrorKind::dimension,
          "matrix shape must be at least 1x1, got " + std::to_string(rows) + "x" +
              std::to_string(cols));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  check_shape(rows, cols);
  data_.assign(rows * cols, 0.0);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_shape(rows, cols);
  require(data_.size() == rows * cols, ErrorKind::dimension,
          "matrix data has " + std::to_string(data_.size()) + " entries, expected " +
              std::to_string(rows * cols));
  require(std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); }),
          ErrorKind::value, "matrix entries must be finite");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  check_shape(rows_, cols_);
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, ErrorKind::dimension, "ragged matrix initializer");
    for (double v : r) {
      require(std::isfinite(v), ErrorKind::value, "matrix entries must be finite");
      data_.push_back(v);
    }
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::column_slice(std::size_t first, std::size_t count) const {
  require(first + count <= cols_ && count > 0, ErrorKind::dimension, "column slice out of range");
  Matrix out(rows_, count);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_ + first), count,
                out.row(r).begin());
  }
  return out;
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::frobenius_norm() const noexcept {
  return std::sqrt(simd::dot(data_, data_));
}

double Matrix::trace() const {
  require(square(), ErrorKind::dimension, "trace of non-square matrix");
  double t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorKind::dimension, "matrix product shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik != 0.0) simd::axpy(aik, b.row(k), dst);
    }
  }
  return out;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), ErrorKind::dimension, "matrix-vector shape mismatch");
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = simd::dot(a.row(i), x);
  return y;
}

std::vector<double> transpose_times(const Matrix& a, std::span<const double> x) {
  require(a.rows() == x.size(), ErrorKind::dimension, "transpose-vector shape mismatch");
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) simd::axpy(x[i], a.row(i), y);
  return y;
}

Matrix gram_of_columns(const Matrix& a) {
  Matrix out(a.cols(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      if (row[i] != 0.0) simd::axpy(row[i], row, out.row(i));
    }
  }
  return out;
}

Matrix gram_of_rows(const Matrix& x, double divisor) {
  const std::size_t p = x.rows();
  Matrix out(p, p);
  const double scale = 1.0 / divisor;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      const double v = simd::dot(x.row(i), x.row(j)) * scale;
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

double norm2(std::span<const double> x) noexcept { return std::sqrt(simd::dot(x, x)); }

}  // namespace lesvote
