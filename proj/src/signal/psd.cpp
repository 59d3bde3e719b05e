#include <algorithm>
#include <cmath>
#include <numbers>

#include "lesvote/error.hpp"
#include "lesvote/fft.hpp"
#include "lesvote/signal.hpp"
#include "lesvote/simd/kernels.hpp"

namespace lesvote::signal {

namespace {

std::vector<double> periodic_hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

// Linear interpolation of samples on the grid k * step (k = 0..values.size()-1).
double interpolate(const std::vector<double>& values, double step, double f) {
  const double pos = f / step;
  const auto last = values.size() - 1;
  if (pos <= 0.0) return values.front();
  if (pos >= static_cast<double>(last)) return values.back();
  const auto k = static_cast<std::size_t>(pos);
  const double t = pos - static_cast<double>(k);
  return values[k] + t * (values[k + 1] - values[k]);
}

}  // namespace

SpectrumMatrix compute_psd(const Recording& rec, double freq_start, double freq_end,
                           std::size_t out_cols) {
  const double fs = rec.sample_rate();
  require(out_cols >= 1, ErrorKind::parameter, "out_cols must be at least 1");
  require(freq_start >= 0.0 && freq_start < freq_end && freq_end <= fs / 2.0,
          ErrorKind::parameter, "PSD range must satisfy 0 <= start < end <= sample_rate/2");

  const auto nperseg = static_cast<std::size_t>(std::lround(kWelchWindowSeconds * fs));
  require(nperseg >= 2, ErrorKind::parameter, "sample rate too low for the Welch window");
  require(rec.samples() >= nperseg, ErrorKind::insufficient_data,
          "recording has " + std::to_string(rec.samples()) + " samples, one Welch window needs " +
              std::to_string(nperseg));

  const std::size_t step = nperseg / 2;
  const std::size_t segments = (rec.samples() - nperseg) / step + 1;
  const auto window = periodic_hann(nperseg);
  double window_power = 0.0;
  for (double w : window) window_power += w * w;

  RealFft fft(nperseg);
  const std::size_t nbins = fft.bins();
  const double bin_hz = fs / static_cast<double>(nperseg);
  std::vector<double> seg(nperseg), spectrum(2 * nbins), power(nbins);

  Matrix out(rec.channels(), out_cols);
  for (std::size_t c = 0; c < rec.channels(); ++c) {
    const auto x = rec.data().row(c);
    std::fill(power.begin(), power.end(), 0.0);
    for (std::size_t s = 0; s < segments; ++s) {
      const auto part = x.subspan(s * step, nperseg);
      double mean = 0.0;
      for (double v : part) mean += v;
      mean /= static_cast<double>(nperseg);
      for (std::size_t i = 0; i < nperseg; ++i) seg[i] = part[i] - mean;
      simd::multiply(seg, window, seg);
      fft.forward(seg, spectrum);
      simd::accumulate_power(spectrum, power);
    }
    // one-sided density: double every bin except DC and (even-length) Nyquist
    const double scale = 1.0 / (fs * window_power * static_cast<double>(segments));
    for (std::size_t k = 0; k < nbins; ++k) {
      const bool edge = k == 0 || (nperseg % 2 == 0 && k == nbins - 1);
      power[k] *= edge ? scale : 2.0 * scale;
    }

    const double width = (freq_end - freq_start) / static_cast<double>(out_cols);
    auto dst = out.row(c);
    for (std::size_t j = 0; j < out_cols; ++j) {
      const double f = freq_start + (static_cast<double>(j) + 0.5) * width;
      dst[j] = std::max(0.0, interpolate(power, bin_hz, f));
    }
  }
  return SpectrumMatrix(std::move(out), freq_start, freq_end, rec.channel_names());
}

}  // namespace lesvote::signal
