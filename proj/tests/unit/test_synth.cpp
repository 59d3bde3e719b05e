#include <cmath>

#include "doctest.h"
#include "lesvote/classifiers.hpp"
#include "lesvote/error.hpp"
#include "lesvote/experiment.hpp"
#include "lesvote/synth.hpp"

using namespace lesvote;
using namespace lesvote::synth;

namespace {

SynthSpec two_class_spec() {
  SynthSpec s;
  s.class_names = {"A", "B"};
  s.samples_per_class = 6;
  s.channels = 16;
  s.duration_s = 20;
  s.sample_rate_hz = 250;
  s.seed = 81;
  return s;
}

// Mean PSD over [lo, hi] and the listed channels, averaged over recordings of `cls`.
double band_power(const SynthSpec& spec, int cls, double lo, double hi, std::size_t channels) {
  double total = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < spec.num_recordings(); ++i) {
    if (label_of(spec, i) != cls) continue;
    const auto psd = signal::compute_psd(generate_recording(spec, i), lo, hi, 50);
    for (std::size_t c = 0; c < channels; ++c)
      for (double v : psd.data().row(c)) {
        total += v;
        ++count;
      }
  }
  return total / static_cast<double>(count);
}

}  // namespace

TEST_CASE("generation is deterministic per index") {
  const auto spec = tiny_profile();
  const auto a = generate_recording(spec, 3);
  const auto b = generate_recording(spec, 3);
  CHECK(a.data() == b.data());
  CHECK(a.class_label() == std::optional<std::string>("HC"));
  CHECK_FALSE(generate_recording(spec, 4).data() == a.data());
  const auto serial = generate(spec, 1);
  const auto threaded = generate(spec, 4);
  for (std::size_t i = 0; i < serial.recordings.size(); ++i)
    CHECK(serial.recordings[i].data() == threaded.recordings[i].data());
  CHECK(serial.labels == threaded.labels);
}

TEST_CASE("flat boost raises band power by the multiplier") {
  auto spec = two_class_spec();
  std::vector<std::size_t> ch(16);
  for (std::size_t c = 0; c < 16; ++c) ch[c] = c;
  spec.boosts.push_back({"B", 31.0, 38.0, 3.0, ch, BoostShape::flat});
  const double ratio = band_power(spec, 1, 32.0, 37.0, 16) / band_power(spec, 0, 32.0, 37.0, 16);
  CHECK(ratio >= 2.0);
  CHECK(ratio == doctest::Approx(3.0).epsilon(0.15));
  const double outside = band_power(spec, 1, 10.0, 20.0, 16) / band_power(spec, 0, 10.0, 20.0, 16);
  CHECK(outside == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("hann boost keeps the band average") {
  auto spec = two_class_spec();
  spec.channels = 4;
  spec.samples_per_class = 10;
  spec.boosts.push_back({"B", 30.0, 40.0, 3.0, {0, 1, 2, 3}, BoostShape::hann});
  const double ratio = band_power(spec, 1, 30.0, 40.0, 4) / band_power(spec, 0, 30.0, 40.0, 4);
  CHECK(ratio == doctest::Approx(3.0).epsilon(0.15));
  const double centre = band_power(spec, 1, 34.0, 36.0, 4) / band_power(spec, 0, 34.0, 36.0, 4);
  CHECK(centre > ratio);
}

TEST_CASE("multipliers below one attenuate") {
  auto spec = two_class_spec();
  spec.channels = 4;
  spec.boosts.push_back({"B", 5.0, 15.0, 0.5, {0, 1, 2, 3}, BoostShape::flat});
  const double ratio = band_power(spec, 1, 6.0, 14.0, 4) / band_power(spec, 0, 6.0, 14.0, 4);
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("class band power is stable across recordings") {
  auto spec = tiny_profile();
  double sum = 0, sq = 0;
  std::vector<double> p;
  for (std::size_t i = 40; i < 80; ++i) {
    const auto psd = signal::compute_psd(generate_recording(spec, i), 32.0, 37.5, 20);
    double v = 0;
    for (double x : psd.data().data()) v += x;
    p.push_back(v);
    sum += v;
  }
  const double mean = sum / 40;
  for (double v : p) sq += (v - mean) * (v - mean);
  CHECK(std::sqrt(sq / 39) / mean < 0.3);
}

TEST_CASE("channel mixing is applied per class") {
  auto spec = two_class_spec();
  spec.channels = 2;
  const auto plain = generate_recording(spec, 7);
  spec.mixing["B"] = Matrix{{2, 0}, {0, 2}};
  const auto mixed = generate_recording(spec, 7);
  for (std::size_t i = 0; i < plain.data().size(); ++i)
    CHECK(mixed.data().data()[i] == 2.0 * plain.data().data()[i]);
  CHECK(generate_recording(spec, 0).data() == [&] { auto s = spec; s.mixing.clear(); return generate_recording(s, 0).data(); }());
}

TEST_CASE("spec validation and JSON round trip") {
  auto spec = paper_profile();
  CHECK(spec.channels == 64);
  CHECK(spec.num_recordings() == 120);
  spec.mixing["CHR"] = Matrix::identity(64);
  const auto back = spec_from_json(to_json(spec));
  CHECK(to_json(back) == to_json(spec));
  CHECK(back.boosts.size() == spec.boosts.size());
  CHECK(back.mixing.at("CHR") == Matrix::identity(64));

  auto bad = tiny_profile();
  bad.boosts[0].multiplier = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = tiny_profile();
  bad.boosts[0].high_hz = 200;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = tiny_profile();
  bad.boosts[0].class_name = "CHR";
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = tiny_profile();
  bad.boosts[0].channels = {8};
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(profile("huge"), Error);
  CHECK(label_of(tiny_profile(), 39) == 0);
  CHECK(label_of(tiny_profile(), 40) == 1);
}

TEST_CASE("without boosts 5-NN sits at chance") {
  auto spec = tiny_profile();
  spec.boosts.clear();
  les::PipelineParams p;
  p.psd_cols = 800;
  const auto table = experiment::extract_feature_table(spec, p, 1);
  const auto data = experiment::case_dataset(table, {"HC", "FES"});
  ml::ClassifierSpec knn;
  knn.kind = ml::ClassifierKind::knn;
  std::size_t correct = 0, total = 0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto split = experiment::draw_split(data.labels, 2, 30, 10, rep + 1);
    const auto model = ml::Classifier::train(data.rows(split.train), knn);
    const auto test = data.rows(split.test);
    const auto pred = model.predict_rows(test.features);
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == test.labels[i];
    total += pred.size();
  }
  // The 400 predictions come from only 80 distinct recordings, so the 95%
  // binomial half-width is taken at n = 80: 1.96 * sqrt(0.25 / 80).
  const double acc = 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  const double half = 100.0 * 1.96 * std::sqrt(0.25 / 80.0);
  CHECK(std::abs(acc - 50.0) <= half);
}
