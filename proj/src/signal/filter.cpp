#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "lesvote/error.hpp"
#include "lesvote/signal.hpp"

namespace lesvote::signal {

namespace {

using cplx = std::complex<double>;

// Digital poles (upper half plane plus the real pole for odd orders) of an
// order-N Butterworth prototype mapped through the bilinear transform with
// the cutoff prewarped.
std::vector<cplx> digital_poles(std::size_t order, double cutoff, double fs) {
  const double warped = 2.0 * fs * std::tan(std::numbers::pi * cutoff / fs);
  std::vector<cplx> poles;
  for (std::size_t k = 0; k < (order + 1) / 2; ++k) {
    const double theta =
        std::numbers::pi * (2.0 * static_cast<double>(k) + static_cast<double>(order) + 1.0) /
        (2.0 * static_cast<double>(order));
    const cplx s = warped * cplx(std::cos(theta), std::sin(theta));
    poles.push_back((2.0 * fs + s) / (2.0 * fs - s));
  }
  return poles;
}

void check_cutoff(std::size_t order, double cutoff, double fs) {
  require(order >= 1, ErrorKind::parameter, "filter order must be positive");
  require(fs > 0.0 && cutoff > 0.0 && cutoff < fs / 2.0, ErrorKind::parameter,
          "cutoff must lie in (0, sample_rate/2)");
}

}  // namespace

std::vector<Biquad> butterworth_lowpass(std::size_t order, double cutoff, double fs) {
  check_cutoff(order, cutoff, fs);
  std::vector<Biquad> sos;
  for (const cplx& z : digital_poles(order, cutoff, fs)) {
    if (std::abs(z.imag()) < 1e-14) {
      const double p = z.real();
      const double g = (1.0 - p) / 2.0;
      sos.push_back({g, g, 0.0, -p, 0.0});
    } else {
      const double a1 = -2.0 * z.real();
      const double a2 = std::norm(z);
      const double g = (1.0 + a1 + a2) / 4.0;
      sos.push_back({g, 2.0 * g, g, a1, a2});
    }
  }
  return sos;
}

std::vector<Biquad> butterworth_highpass(std::size_t order, double cutoff, double fs) {
  check_cutoff(order, cutoff, fs);
  std::vector<Biquad> sos;
  // The high-pass prototype s -> wc/s maps the unit-circle Butterworth poles
  // onto themselves, so only the zeros (now at z = 1) and gains change.
  for (const cplx& z : digital_poles(order, cutoff, fs)) {
    if (std::abs(z.imag()) < 1e-14) {
      const double p = z.real();
      const double g = (1.0 + p) / 2.0;
      sos.push_back({g, -g, 0.0, -p, 0.0});
    } else {
      const double a1 = -2.0 * z.real();
      const double a2 = std::norm(z);
      const double g = (1.0 - a1 + a2) / 4.0;
      sos.push_back({g, -2.0 * g, g, a1, a2});
    }
  }
  return sos;
}

double cascade_magnitude(const std::vector<Biquad>& sections, double f, double fs) {
  const cplx z1 = std::polar(1.0, -2.0 * std::numbers::pi * f / fs);  // z^-1
  const cplx z2 = z1 * z1;
  cplx h = 1.0;
  for (const Biquad& s : sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return std::abs(h);
}

namespace {

// Transposed direct form II, in place. The state starts at the steady state
// for a constant input equal to the mean of the first `settle` samples, which
// keeps the slow high-pass poles from seeing a step at the first sample.
void sosfilt_inplace(const std::vector<Biquad>& sections, std::vector<double>& x,
                     std::size_t settle) {
  if (x.empty()) return;
  settle = std::clamp<std::size_t>(settle, 1, x.size());
  double x0 = 0.0;
  for (std::size_t i = 0; i < settle; ++i) x0 += x[i];
  x0 /= static_cast<double>(settle);

  double gain_in = 1.0;
  for (const Biquad& s : sections) {
    const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double u = gain_in * x0;
    double z1 = (dc - s.b0) * u;
    double z2 = (s.b2 - s.a2 * dc) * u;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
    gain_in *= dc;
  }
}

}  // namespace

std::vector<double> filtfilt(const std::vector<Biquad>& sections, std::span<const double> x,
                             std::size_t padlen) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  padlen = std::min(padlen, n - 1);

  // Even (mirror) extension keeps the local level continuous, so the slow
  // high-pass poles see no step at the junction.
  std::vector<double> ext(n + 2 * padlen);
  for (std::size_t i = 0; i < padlen; ++i) ext[i] = x[padlen - i];
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(padlen));
  for (std::size_t i = 0; i < padlen; ++i) ext[padlen + n + i] = x[n - 2 - i];

  sosfilt_inplace(sections, ext, padlen);
  std::reverse(ext.begin(), ext.end());
  sosfilt_inplace(sections, ext, padlen);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(padlen),
          ext.begin() + static_cast<std::ptrdiff_t>(padlen + n)};
}

Recording bandpass_filter(const Recording& rec, double low, double high) {
  const double fs = rec.sample_rate();
  require(low > 0.0 && low < high && high < fs / 2.0, ErrorKind::parameter,
          "band edges must satisfy 0 < low < high < sample_rate/2");

  std::vector<Biquad> sections = butterworth_highpass(kHighpassOrder, low, fs);
  const auto lp = butterworth_lowpass(kLowpassOrder, high, fs);
  sections.insert(sections.end(), lp.begin(), lp.end());

  // Pad by one period of the low edge so the high-pass transient has
  // settled before the original samples start.
  const auto padlen = static_cast<std::size_t>(std::ceil(fs / low));

  Matrix out(rec.channels(), rec.samples());
  for (std::size_t c = 0; c < rec.channels(); ++c) {
    const auto y = filtfilt(sections, rec.data().row(c), padlen);
    std::copy(y.begin(), y.end(), out.row(c).begin());
  }
  return Recording(std::move(out), fs, rec.channel_names(), rec.class_label());
}

}  // namespace lesvote::signal
