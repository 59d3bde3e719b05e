#include <algorithm>
#include <cmath>

#include "lesvote/error.hpp"
#include "lesvote/signal.hpp"

namespace lesvote::signal {

std::vector<std::string> default_channel_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back("ch" + std::to_string(i));
  return names;
}

Recording::Recording(Matrix data, double sample_rate, std::vector<std::string> channel_names,
                     std::optional<std::string> class_label)
    : data_(std::move(data)),
      sample_rate_(sample_rate),
      channel_names_(std::move(channel_names)),
      class_label_(std::move(class_label)) {
  require(!data_.empty(), ErrorKind::dimension, "recording needs at least one channel");
  require(std::isfinite(sample_rate_) && sample_rate_ > 0.0, ErrorKind::parameter,
          "sample rate must be positive");
  if (channel_names_.empty()) channel_names_ = default_channel_names(data_.rows());
  require(channel_names_.size() == data_.rows(), ErrorKind::dimension,
          "channel name count does not match channel count");
}

SpectrumMatrix::SpectrumMatrix(Matrix psd, double freq_start, double freq_end,
                               std::vector<std::string> channel_names)
    : data_(std::move(psd)),
      freq_start_(freq_start),
      freq_end_(freq_end),
      channel_names_(std::move(channel_names)) {
  require(!data_.empty(), ErrorKind::dimension, "spectrum matrix is empty");
  require(freq_start_ < freq_end_, ErrorKind::parameter, "freq_start must be below freq_end");
  const auto values = data_.data();
  require(std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; }),
          ErrorKind::value, "PSD entries must be non-negative");
  if (channel_names_.empty()) channel_names_ = default_channel_names(data_.rows());
  require(channel_names_.size() == data_.rows(), ErrorKind::dimension,
          "channel name count does not match channel count");
}

}  // namespace lesvote::signal
