#pragma once

#include <cstddef>
#include <memory>
#include <span>

namespace lesvote {

/// Real-input FFT of a fixed length backed by FFTW. Instances are not
/// thread-safe; create one per thread. Plan creation is serialised internally.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  /// Unnormalised forward transform; `spectrum` receives bins() interleaved
  /// (re, im) pairs.
  void forward(std::span<const double> input, std::span<double> spectrum);

  /// Unnormalised inverse: output[t] = sum_k X_k e^{+2 pi i k t / n}, i.e. n
  /// times the textbook inverse.
  void inverse(std::span<const double> spectrum, std::span<double> output);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lesvote
