#include "lesvote/simd/kernels.hpp"

namespace lesvote::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void multiply_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void accumulate_power_scalar(const double* z, double* acc, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double re = z[2 * k];
    const double im = z[2 * k + 1];
    acc[k] += re * re + im * im;
  }
}

}  // namespace

const KernelTable scalar_table{
    Isa::scalar,          dot_scalar,      squared_distance_scalar,
    axpy_scalar,          multiply_scalar, accumulate_power_scalar,
};

}  // namespace lesvote::simd::detail
