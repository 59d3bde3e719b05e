#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lesvote/matrix.hpp"

namespace lesvote::signal {

/// Multichannel time-domain recording: one row of `data` per channel.
class Recording {
 public:
  Recording(Matrix data, double sample_rate, std::vector<std::string> channel_names = {},
            std::optional<std::string> class_label = std::nullopt);

  std::size_t channels() const noexcept { return data_.rows(); }
  std::size_t samples() const noexcept { return data_.cols(); }
  double sample_rate() const noexcept { return sample_rate_; }
  double duration() const noexcept { return static_cast<double>(samples()) / sample_rate_; }

  const Matrix& data() const noexcept { return data_; }
  const std::vector<std::string>& channel_names() const noexcept { return channel_names_; }
  const std::optional<std::string>& class_label() const noexcept { return class_label_; }
  void set_class_label(std::optional<std::string> label) { class_label_ = std::move(label); }

 private:
  Matrix data_;
  double sample_rate_;
  std::vector<std::string> channel_names_;
  std::optional<std::string> class_label_;
};

/// Default channel labels "ch0", "ch1", ...
std::vector<std::string> default_channel_names(std::size_t n);

/// Per-channel power spectral density on a uniform grid of `cols()` bins
/// spanning [freq_start, freq_end]; column j is centred on
/// freq_start + (j + 0.5) * bin_width().
class SpectrumMatrix {
 public:
  SpectrumMatrix(Matrix psd, double freq_start, double freq_end,
                 std::vector<std::string> channel_names = {});

  std::size_t channels() const noexcept { return data_.rows(); }
  std::size_t cols() const noexcept { return data_.cols(); }
  double freq_start() const noexcept { return freq_start_; }
  double freq_end() const noexcept { return freq_end_; }
  double bin_width() const noexcept { return (freq_end_ - freq_start_) / static_cast<double>(cols()); }
  double bin_center(std::size_t j) const noexcept {
    return freq_start_ + (static_cast<double>(j) + 0.5) * bin_width();
  }
  const Matrix& data() const noexcept { return data_; }
  const std::vector<std::string>& channel_names() const noexcept { return channel_names_; }

 private:
  Matrix data_;
  double freq_start_;
  double freq_end_;
  std::vector<std::string> channel_names_;
};

struct BlockingScheme {
  std::size_t block_width = 0;
  std::size_t num_blocks = 0;
  double delta_f = 0.0;
};

/// A contiguous run of spectrum columns; [freq_lo, freq_hi) are the block's
/// bin edges, so consecutive blocks tile the spectrum's frequency span.
struct SpectralBlock {
  std::size_t index = 0;
  double freq_lo = 0.0;
  double freq_hi = 0.0;
  Matrix data;
};

struct BlockSplit {
  std::vector<SpectralBlock> blocks;
  BlockingScheme scheme;
};

/// Zero-phase band-pass (forward-backward Butterworth cascade). Output has the
/// input's shape. Requires 0 < low < high < sample_rate / 2.
Recording bandpass_filter(const Recording& rec, double low, double high);

/// Welch PSD (2 s Hann windows, 50% overlap, one-sided density) linearly
/// interpolated onto `out_cols` uniform bins over [freq_start, freq_end].
SpectrumMatrix compute_psd(const Recording& rec, double freq_start, double freq_end,
                           std::size_t out_cols);

/// Splits the spectrum into cols / block_width equal blocks, low to high
/// frequency. Throws ErrorKind::blocking when the width does not divide cols.
BlockSplit split_blocks(const SpectrumMatrix& spec, std::size_t block_width);

// Lower-level pieces exposed for tests and the synthetic generator.

/// Second-order section: b0 b1 b2 over 1 a1 a2.
struct Biquad {
  double b0, b1, b2, a1, a2;
};

std::vector<Biquad> butterworth_lowpass(std::size_t order, double cutoff, double sample_rate);
std::vector<Biquad> butterworth_highpass(std::size_t order, double cutoff, double sample_rate);

/// |H(e^{jw})| of a cascade at frequency f.
double cascade_magnitude(const std::vector<Biquad>& sections, double f, double sample_rate);

/// Forward-backward filtering of one channel with mirror padding of `padlen`
/// samples; each pass starts at the steady state for the pad mean.
std::vector<double> filtfilt(const std::vector<Biquad>& sections, std::span<const double> x,
                             std::size_t padlen);

/// Filter orders used by bandpass_filter.
inline constexpr std::size_t kHighpassOrder = 4;
inline constexpr std::size_t kLowpassOrder = 14;

/// Welch segment length in seconds.
inline constexpr double kWelchWindowSeconds = 2.0;

}  // namespace lesvote::signal
