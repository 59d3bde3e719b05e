#include "lesvote/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "lesvote/error.hpp"

namespace lesvote {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Impl {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

RealFft::RealFft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  require(n >= 2, ErrorKind::parameter, "FFT length must be at least 2");
  std::lock_guard lock(planner_mutex());
  impl_->real = fftw_alloc_real(n);
  impl_->cplx = fftw_alloc_complex(n / 2 + 1);
  const int len = static_cast<int>(n);
  impl_->fwd = fftw_plan_dft_r2c_1d(len, impl_->real, impl_->cplx, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_1d(len, impl_->cplx, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->inv);
  fftw_free(impl_->real);
  fftw_free(impl_->cplx);
}

void RealFft::forward(std::span<const double> input, std::span<double> spectrum) {
  require(input.size() == n_ && spectrum.size() == 2 * bins(), ErrorKind::dimension,
          "FFT buffer size mismatch");
  std::copy(input.begin(), input.end(), impl_->real);
  fftw_execute(impl_->fwd);
  const double* c = reinterpret_cast<const double*>(impl_->cplx);
  std::copy(c, c + 2 * bins(), spectrum.begin());
}

void RealFft::inverse(std::span<const double> spectrum, std::span<double> output) {
  require(output.size() == n_ && spectrum.size() == 2 * bins(), ErrorKind::dimension,
          "FFT buffer size mismatch");
  double* c = reinterpret_cast<double*>(impl_->cplx);
  std::copy(spectrum.begin(), spectrum.end(), c);
  // c2r destroys its input; the buffer is rewritten on every call.
  fftw_execute(impl_->inv);
  std::copy(impl_->real, impl_->real + n_, output.begin());
}

}  // namespace lesvote
