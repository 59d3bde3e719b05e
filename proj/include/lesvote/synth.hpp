#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "lesvote/matrix.hpp"
#include "lesvote/signal.hpp"

namespace lesvote::synth {

enum class BoostShape { flat, hann };

/// Extra band-limited power for one class: a source shared by `channels`
/// whose PSD averaged over [low_hz, high_hz] raises the baseline by
/// `multiplier`. A hann shape concentrates the excess toward the band centre
/// (raised-cosine passband) with the same band-average. Multipliers below one
/// attenuate each listed channel's own in-band spectrum instead.
struct BandBoost {
  std::string class_name;
  double low_hz = 0.0;
  double high_hz = 0.0;
  double multiplier = 1.0;
  std::vector<std::size_t> channels;
  BoostShape shape = BoostShape::flat;
};

struct SynthSpec {
  std::vector<std::string> class_names{"HC", "FES"};
  std::size_t samples_per_class = 40;
  std::size_t channels = 8;
  double duration_s = 10.0;
  double sample_rate_hz = 250.0;
  double base_noise_power = 1.0;  // per-sample variance of the white background
  std::vector<BandBoost> boosts;
  std::map<std::string, Matrix> mixing;  // optional C x C matrix per class
  std::uint64_t seed = 1;

  std::size_t num_samples() const;
  std::size_t num_recordings() const noexcept { return class_names.size() * samples_per_class; }

  /// Throws ErrorKind::parameter on an invalid spec.
  void validate() const;
};

/// Two classes HC/FES, 40 each, 8 channels, 10 s at 250 Hz; FES carries a x3
/// hann-shaped boost on 32-37.5 Hz across all channels.
SynthSpec tiny_profile();

/// HC/CHR/FES, 40 each, 64 channels, 60 s at 1000 Hz. FES: x3 on 32-37.5 Hz
/// and x2 on 1-6 Hz over 16 channels each; CHR: x1.8 on 32-37.5 Hz.
SynthSpec paper_profile();

SynthSpec profile(const std::string& name);

nlohmann::json to_json(const SynthSpec& spec);
SynthSpec spec_from_json(const nlohmann::json& j);

/// Class index of recording `index` (recordings are ordered class by class).
int label_of(const SynthSpec& spec, std::size_t index);

/// Recording `index` of the dataset. Depends only on (spec, index), so
/// recordings can be produced in any order or in parallel.
signal::Recording generate_recording(const SynthSpec& spec, std::size_t index);

struct SynthDataset {
  std::vector<signal::Recording> recordings;
  std::vector<int> labels;
  std::vector<std::string> class_names;
};

SynthDataset generate(const SynthSpec& spec, std::size_t jobs = 1);

}  // namespace lesvote::synth
