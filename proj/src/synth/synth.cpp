#include "lesvote/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>

#include "lesvote/error.hpp"
#include "lesvote/fft.hpp"
#include "lesvote/parallel.hpp"
#include "lesvote/seed.hpp"

namespace lesvote::synth {

std::size_t SynthSpec::num_samples() const {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
}

void SynthSpec::validate() const {
  require(!class_names.empty(), ErrorKind::parameter, "synth spec needs at least one class");
  require(samples_per_class >= 1, ErrorKind::parameter, "samples_per_class must be positive");
  require(channels >= 1, ErrorKind::parameter, "channels must be positive");
  require(std::isfinite(sample_rate_hz) && sample_rate_hz > 0, ErrorKind::parameter,
          "sample rate must be positive");
  require(std::isfinite(duration_s) && duration_s > 0 && num_samples() >= 2, ErrorKind::parameter,
          "duration too short");
  require(std::isfinite(base_noise_power) && base_noise_power > 0, ErrorKind::parameter,
          "base_noise_power must be positive");
  auto known = [&](const std::string& name) {
    return std::find(class_names.begin(), class_names.end(), name) != class_names.end();
  };
  for (const auto& b : boosts) {
    require(known(b.class_name), ErrorKind::parameter, "boost for unknown class '" + b.class_name + "'");
    require(std::isfinite(b.multiplier) && b.multiplier > 0, ErrorKind::parameter,
            "boost multiplier must be positive");
    require(b.low_hz > 0 && b.low_hz < b.high_hz && b.high_hz < sample_rate_hz / 2,
            ErrorKind::parameter, "boost band must lie inside (0, sample_rate/2)");
    for (auto c : b.channels)
      require(c < channels, ErrorKind::parameter, "boost channel index out of range");
  }
  for (const auto& [name, a] : mixing) {
    require(known(name), ErrorKind::parameter, "mixing matrix for unknown class '" + name + "'");
    require(a.rows() == channels && a.cols() == channels, ErrorKind::parameter,
            "mixing matrix must be channels x channels");
  }
}

SynthSpec tiny_profile() {
  SynthSpec s;
  s.class_names = {"HC", "FES"};
  s.samples_per_class = 40;
  s.channels = 8;
  s.duration_s = 10.0;
  s.sample_rate_hz = 250.0;
  s.boosts.push_back({"FES", 32.0, 37.5, 3.0, {0, 1, 2, 3, 4, 5, 6, 7}, BoostShape::hann});
  s.seed = 20240601;
  return s;
}

SynthSpec paper_profile() {
  SynthSpec s;
  s.class_names = {"HC", "CHR", "FES"};
  s.samples_per_class = 40;
  s.channels = 64;
  s.duration_s = 60.0;
  s.sample_rate_hz = 1000.0;
  std::vector<std::size_t> upper(16), lower(16);
  std::iota(upper.begin(), upper.end(), 0);
  std::iota(lower.begin(), lower.end(), 32);
  s.boosts.push_back({"FES", 32.0, 37.5, 3.0, upper});
  s.boosts.push_back({"FES", 1.0, 6.0, 2.0, lower});
  s.boosts.push_back({"CHR", 32.0, 37.5, 1.8, upper});
  s.seed = 20240601;
  return s;
}

SynthSpec profile(const std::string& name) {
  if (name == "tiny") return tiny_profile();
  if (name == "paper") return paper_profile();
  fail(ErrorKind::parameter, "unknown profile '" + name + "' (expected tiny or paper)");
}

nlohmann::json to_json(const SynthSpec& spec) {
  nlohmann::json j;
  j["class_names"] = spec.class_names;
  j["samples_per_class"] = spec.samples_per_class;
  j["channels"] = spec.channels;
  j["duration_s"] = spec.duration_s;
  j["sample_rate_hz"] = spec.sample_rate_hz;
  j["base_noise_power"] = spec.base_noise_power;
  auto boosts = nlohmann::json::array();
  for (const auto& b : spec.boosts) {
    boosts.push_back({{"class", b.class_name},
                      {"band_hz", {b.low_hz, b.high_hz}},
                      {"multiplier", b.multiplier},
                      {"channels", b.channels},
                      {"shape", b.shape == BoostShape::hann ? "hann" : "flat"}});
  }
  j["boosts"] = boosts;
  auto mixing = nlohmann::json::object();
  for (const auto& [name, a] : spec.mixing) {
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < a.rows(); ++r) {
      const auto row = a.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    mixing[name] = rows;
  }
  j["mixing"] = mixing;
  j["seed"] = spec.seed;
  return j;
}

SynthSpec spec_from_json(const nlohmann::json& j) {
  SynthSpec s;
  try {
    s.class_names = j.value("class_names", s.class_names);
    s.samples_per_class = j.value("samples_per_class", s.samples_per_class);
    s.channels = j.value("channels", s.channels);
    s.duration_s = j.value("duration_s", s.duration_s);
    s.sample_rate_hz = j.value("sample_rate_hz", s.sample_rate_hz);
    s.base_noise_power = j.value("base_noise_power", s.base_noise_power);
    s.seed = j.value("seed", s.seed);
    if (j.contains("boosts")) {
      for (const auto& b : j.at("boosts")) {
        const auto band = b.at("band_hz").get<std::vector<double>>();
        require(band.size() == 2, ErrorKind::parameter, "band_hz must have two entries");
        const auto shape = b.value("shape", std::string("flat"));
        require(shape == "flat" || shape == "hann", ErrorKind::parameter,
                "boost shape must be flat or hann");
        s.boosts.push_back({b.at("class").get<std::string>(), band[0], band[1],
                            b.at("multiplier").get<double>(),
                            b.at("channels").get<std::vector<std::size_t>>(),
                            shape == "hann" ? BoostShape::hann : BoostShape::flat});
      }
    }
    if (j.contains("mixing")) {
      for (const auto& [name, rows] : j.at("mixing").items()) {
        const auto r = rows.get<std::vector<std::vector<double>>>();
        Matrix a(r.size(), r.empty() ? 0 : r.front().size());
        for (std::size_t i = 0; i < r.size(); ++i) {
          require(r[i].size() == a.cols(), ErrorKind::parameter, "ragged mixing matrix");
          std::copy(r[i].begin(), r[i].end(), a.row(i).begin());
        }
        s.mixing.emplace(name, std::move(a));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parameter, std::string("synth spec: ") + e.what());
  }
  s.validate();
  return s;
}

int label_of(const SynthSpec& spec, std::size_t index) {
  require(index < spec.num_recordings(), ErrorKind::parameter, "recording index out of range");
  return static_cast<int>(index / spec.samples_per_class);
}

namespace {

// Shared source with one-sided PSD (multiplier - 1) * 2 sigma^2 / fs inside
// the band: white spectrum coefficients with E|X_k|^2 = (g - 1) sigma^2 N on
// the in-band bins, inverted and divided by N.
std::vector<double> band_source(const BandBoost& b, const SynthSpec& spec, RealFft& fft,
                                std::mt19937_64& rng) {
  const std::size_t n = fft.size();
  const double fs = spec.sample_rate_hz;
  std::vector<double> spectrum(2 * fft.bins(), 0.0);
  std::vector<double> out(n, 0.0);
  const double excess = b.multiplier - 1.0;
  if (excess <= 0.0) return out;
  const double sd = std::sqrt(excess * spec.base_noise_power * static_cast<double>(n) / 2.0);
  std::vector<std::size_t> bins;
  std::vector<double> gain;
  for (std::size_t k = 1; k < fft.bins(); ++k) {
    if (2 * k == n) continue;  // Nyquist bin must stay real
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f < b.low_hz || f > b.high_hz) continue;
    bins.push_back(k);
    const double u = (f - b.low_hz) / (b.high_hz - b.low_hz);
    gain.push_back(b.shape == BoostShape::hann ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * u) : 1.0);
  }
  double mean_gain = 0.0;
  for (double g : gain) mean_gain += g;
  if (bins.empty() || mean_gain <= 0.0) return out;
  mean_gain /= static_cast<double>(gain.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const double scale = sd * std::sqrt(gain[i] / mean_gain);
    spectrum[2 * bins[i]] = scale * normal(rng);
    spectrum[2 * bins[i] + 1] = scale * normal(rng);
  }
  fft.inverse(spectrum, out);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= inv_n;
  return out;
}

// Multipliers below one scale the channel's own in-band spectrum by sqrt(g).
void attenuate(std::span<double> row, const BandBoost& b, double fs, RealFft& fft) {
  const std::size_t n = fft.size();
  std::vector<double> spectrum(2 * fft.bins());
  fft.forward(row, spectrum);
  const double gain = std::sqrt(b.multiplier);
  for (std::size_t k = 0; k < fft.bins(); ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f < b.low_hz || f > b.high_hz) continue;
    spectrum[2 * k] *= gain;
    spectrum[2 * k + 1] *= gain;
  }
  fft.inverse(spectrum, row);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& v : row) v *= inv_n;
}

}  // namespace

signal::Recording generate_recording(const SynthSpec& spec, std::size_t index) {
  const int label = label_of(spec, index);
  const std::string& cls = spec.class_names[static_cast<std::size_t>(label)];
  const std::size_t n = spec.num_samples();
  std::mt19937_64 rng(derive_seed(spec.seed, {index}));
  std::normal_distribution<double> noise(0.0, std::sqrt(spec.base_noise_power));

  Matrix x(spec.channels, n);
  for (std::size_t c = 0; c < spec.channels; ++c)
    for (double& v : x.row(c)) v = noise(rng);

  bool any_boost = false;
  for (const auto& b : spec.boosts) any_boost |= b.class_name == cls;
  if (any_boost) {
    RealFft fft(n);
    for (const auto& b : spec.boosts) {
      if (b.class_name != cls) continue;
      if (b.multiplier < 1.0) {
        for (auto c : b.channels) attenuate(x.row(c), b, spec.sample_rate_hz, fft);
        continue;
      }
      const auto src = band_source(b, spec, fft, rng);
      for (auto c : b.channels) {
        auto row = x.row(c);
        for (std::size_t t = 0; t < n; ++t) row[t] += src[t];
      }
    }
  }

  if (auto it = spec.mixing.find(cls); it != spec.mixing.end()) x = it->second * x;
  return signal::Recording(std::move(x), spec.sample_rate_hz, {}, cls);
}

SynthDataset generate(const SynthSpec& spec, std::size_t jobs) {
  spec.validate();
  SynthDataset out;
  out.class_names = spec.class_names;
  const std::size_t total = spec.num_recordings();
  std::vector<std::optional<signal::Recording>> recs(total);
  parallel_for(total, jobs, [&](std::size_t i) { recs[i].emplace(generate_recording(spec, i)); });
  out.recordings.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    out.recordings.push_back(std::move(*recs[i]));
    out.labels.push_back(label_of(spec, i));
  }
  return out;
}

}  // namespace lesvote::synth
