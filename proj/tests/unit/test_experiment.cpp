#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lesvote/dataset_io.hpp"
#include "lesvote/error.hpp"
#include "lesvote/experiment.hpp"
#include "lesvote/recording_io.hpp"

using namespace lesvote;
using namespace lesvote::experiment;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  auto c = default_config("tiny");
  auto& s = c.source.synth;
  s.samples_per_class = 12;
  s.channels = 4;
  s.duration_s = 8;
  s.sample_rate_hz = 200;
  s.boosts[0].channels = {0, 1, 2, 3};
  s.seed = 7;
  c.repetitions = 3;
  c.train_per_class = 8;
  c.test_per_class = 4;
  c.inner_folds = 4;
  c.seed = 5;
  return c;
}

const FeatureTable& small_table() {
  static const FeatureTable t = feature_table(small_config());
  return t;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("profile defaults") {
  const auto tiny = default_config("tiny");
  CHECK(tiny.repetitions == 20);
  CHECK(tiny.train_per_class == 30);
  CHECK(tiny.test_per_class == 10);
  CHECK(tiny.pipeline.num_blocks() == 8);
  const auto paper = default_config("paper");
  CHECK(paper.pipeline.psd_cols == 14200);
  CHECK(paper.pipeline.num_blocks() == 142);
  CHECK(paper.cases.size() == 2);
  CHECK(paper.source.synth.channels == 64);
  CHECK_NOTHROW(paper.validate());
  CHECK_THROWS_AS(default_config("huge"), Error);
}

TEST_CASE("config JSON round trip and overrides") {
  auto c = small_config();
  c.label_codes = {{"HC", 1.0}, {"FES", -1.0}};
  c.classifiers[1].knn.k = 3;
  const auto j = to_json(c);
  const auto back = config_from_json(j, default_config("paper"));
  CHECK(to_json(back) == j);

  const auto over = config_from_json(nlohmann::json::parse(R"({"repetitions": 4, "classifiers": ["knn"], "methods": ["constrained"]})"), c);
  CHECK(over.repetitions == 4);
  CHECK(over.classifiers.size() == 1);
  CHECK(over.classifiers[0].kind == ml::ClassifierKind::knn);
  CHECK(over.methods.size() == 1);
  CHECK(over.train_per_class == 8);

  const auto reset = config_from_json(nlohmann::json::parse(R"({"profile": "paper"})"), c);
  CHECK(reset.source.synth.channels == 64);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"methods": ["ridge"]})"), c), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"repetitions": "many"})"), c), Error);
}

TEST_CASE("config validation") {
  auto c = small_config();
  c.train_per_class = 10;
  c.test_per_class = 3;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.pipeline.block_width = 300;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.cases = {{"HC", "HC"}};
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("splits are disjoint, per-class and seeded") {
  std::vector<int> labels;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 40; ++i) labels.push_back(c);
  const auto a = draw_split(labels, 3, 30, 10, 17);
  const auto b = draw_split(labels, 3, 30, 10, 17);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  CHECK(a.train.size() == 90);
  CHECK(a.test.size() == 30);
  std::set<std::size_t> all(a.train.begin(), a.train.end());
  for (auto t : a.test) CHECK(all.insert(t).second);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::count_if(a.train.begin(), a.train.end(), [&](auto i) { return labels[i] == c; }) == 30);
    CHECK(std::count_if(a.test.begin(), a.test.end(), [&](auto i) { return labels[i] == c; }) == 10);
  }
  CHECK_FALSE(draw_split(labels, 3, 30, 10, 18).train == a.train);
  CHECK_THROWS_AS(draw_split(labels, 3, 35, 10, 1), Error);
}

TEST_CASE("case dataset relabels in the requested order") {
  const auto& t = small_table();
  const auto d = case_dataset(t, {"FES", "HC"});
  CHECK(d.size() == 24);
  CHECK(d.labels.front() == 1);  // first recordings are HC
  CHECK_THROWS_AS(case_dataset(t, {"HC", "CHR"}), Error);
}

TEST_CASE("small experiment: structure, aggregates and tables") {
  const auto c = small_config();
  const auto report = run_experiment(c, small_table());
  const auto j = to_json(report);
  REQUIRE(j["cases"].size() == 1);
  const auto& cs = j["cases"][0];
  CHECK(cs["name"] == "HC-FES");
  CHECK(cs["positive_class"] == "HC");
  REQUIRE(cs["repetitions"].size() == 3);
  std::set<std::uint64_t> seeds;
  for (const auto& r : cs["repetitions"]) {
    seeds.insert(r["seed"].get<std::uint64_t>());
    CHECK(r["train"].size() == 16);
    CHECK(r["test"].size() == 8);
    CHECK(r["results"].size() == 6);  // 2 classifiers x 3 conditions
    for (const auto& res : r["results"]) {
      if (res["condition"] == "original") {
        CHECK(res["feature_dim"] == 8);
        CHECK_FALSE(res.contains("weights"));
      } else {
        CHECK(res["weights"]["w"].size() == 8);
        CHECK(res["augmentation"]["levels"].size() == 8);
        CHECK(res["feature_dim"].get<std::size_t>() >= 8);
      }
    }
  }
  CHECK(seeds.size() == 3);

  for (const auto& a : cs["aggregate"]) {
    double sum = 0;
    for (const auto& r : cs["repetitions"])
      for (const auto& res : r["results"])
        if (res["classifier"] == a["classifier"] && res["condition"] == a["condition"])
          sum += res["accuracy"].get<double>();
    CHECK(std::abs(a["accuracy"]["mean"].get<double>() - sum / 3) < 1e-12);
  }

  const auto metrics = lines(metrics_csv(j));
  CHECK(metrics[0] == "case,classifier,condition,repetition,accuracy,sensitivity,specificity,accuracy_std,accuracy_mse");
  CHECK(metrics.size() == 1 + 6 * 3 + 6);
  CHECK(std::count_if(metrics.begin(), metrics.end(), [](const std::string& l) { return l.find(",mean,") != std::string::npos; }) == 6);

  const auto weights = lines(weights_csv(j));
  CHECK(weights.size() == 1 + 2 * 2 * 3 * 8);
  const auto table = lines(accuracy_table_csv(j));
  REQUIRE(table.size() == 3);
  CHECK(table[0] == "case,classifier,original,constrained,unconstrained");
  CHECK(table[1].find(" +/- ") != std::string::npos);

  const auto profile = lines(emit_weight_profile(j, "HC-FES", "svm"));
  REQUIRE(profile.size() == 9);
  CHECK(profile[0] == "band_lo_hz,band_hi_hz,W_constrained_mean,W_unconstrained_mean");
  CHECK(profile[1].rfind("0.5,6.6875,", 0) == 0);
  CHECK(profile[8].rfind("43.8125,50,", 0) == 0);
  CHECK(emit_weight_profile(j, "HC-FES", "lda") == profile[0] + "\n");

  const auto cat = lines(category_table_csv(j, "HC-FES"));
  CHECK(cat[0] == "classifier,condition,predicted,HC,FES");
  CHECK(cat.size() == 1 + 6 * 2);
  CHECK_THROWS_AS(category_table_csv(j, "HC-CHR"), Error);
}

TEST_CASE("weight profile of a single repetition equals its W") {
  auto c = small_config();
  c.repetitions = 1;
  c.classifiers.resize(1);
  const auto j = to_json(run_experiment(c, small_table()));
  const auto rows = lines(emit_weight_profile(j, "HC-FES", "svm"));
  const auto& res = j["cases"][0]["repetitions"][0]["results"];
  for (const auto& r : res) {
    if (r["condition"] != "constrained") continue;
    for (std::size_t b = 0; b < 8; ++b) {
      const auto cell = rows[b + 1].substr(0, rows[b + 1].rfind(','));
      const auto value = cell.substr(cell.rfind(',') + 1);
      CHECK(value == format_number(r["weights"]["W"][b].get<double>()));
    }
  }
}

TEST_CASE("parallel repetitions reproduce the serial report") {
  auto c = small_config();
  const auto serial = metrics_csv(to_json(run_experiment(c, small_table())));
  c.jobs = 3;
  const auto table = feature_table(c);
  CHECK(table.features == small_table().features);
  CHECK(metrics_csv(to_json(run_experiment(c, table))) == serial);
}

TEST_CASE("three-class case emits a Table-V style category table") {
  auto c = small_config();
  c.source.synth.class_names = {"HC", "CHR", "FES"};
  c.source.synth.samples_per_class = 12;
  c.source.synth.boosts.push_back({"CHR", 1.0, 6.0, 2.0, {0, 1}, synth::BoostShape::flat});
  c.cases = {{"HC", "CHR", "FES"}};
  c.repetitions = 2;
  const auto j = to_json(run_experiment(c, feature_table(c)));
  const auto& cs = j["cases"][0];
  CHECK(cs["label_codes"] == nlohmann::json::array({0.0, 1.0, 2.0}));
  const auto cat = lines(category_table_csv(j, "HC-CHR-FES"));
  CHECK(cat[0] == "classifier,condition,predicted,HC,CHR,FES");
  CHECK(cat.size() == 1 + 6 * 3);
  for (const auto& r : cs["repetitions"])
    for (const auto& res : r["results"]) {
      CHECK(res["sensitivity"].is_null());
      CHECK(res["confusion"].size() == 3);
    }
}

TEST_CASE("write_outputs and manifest-driven extraction") {
  const auto dir = fs::temp_directory_path() / "lesvote_test_outputs";
  fs::remove_all(dir);
  auto c = small_config();
  c.repetitions = 1;
  const auto j = to_json(run_experiment(c, small_table()));
  write_outputs(j, dir);
  for (const char* f : {"report.json", "metrics.csv", "weights.csv", "confusion.csv", "accuracy_table.csv",
                        "category_table_HC-FES.csv", "weight_profile_HC-FES_svm.csv", "weight_profile_HC-FES_knn.csv"})
    CHECK(fs::exists(dir / f));
  const auto saved = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(saved.contains("generated_at"));
  CHECK(metrics_csv(saved) == slurp(dir / "metrics.csv"));

  // Same features through a recordings manifest and a features manifest.
  const auto& spec = c.source.synth;
  io::Manifest rec;
  rec.kind = "recordings";
  rec.class_names = spec.class_names;
  io::Manifest feat = rec;
  feat.kind = "features";
  fs::create_directories(dir / "rec");
  for (std::size_t i = 0; i < spec.num_recordings(); ++i) {
    const auto r = synth::generate_recording(spec, i);
    const auto name = "rec/r" + std::to_string(i) + ".bin";
    io::write_recording_binary(dir / name, r);
    rec.entries.push_back({name, *r.class_label()});
    const auto fname = "rec/f" + std::to_string(i) + ".csv";
    io::write_features_csv(dir / fname, les::recording_features(r, c.pipeline));
    feat.entries.push_back({fname, *r.class_label()});
  }
  io::write_manifest(dir / "recordings.json", rec);
  io::write_manifest(dir / "features.json", feat);
  const auto from_rec = load_feature_table(dir / "recordings.json", c.pipeline, 1);
  const auto from_feat = load_feature_table(dir / "features.json", c.pipeline, 1);
  CHECK(from_rec.features == small_table().features);
  CHECK(from_rec.labels == small_table().labels);
  for (std::size_t i = 0; i < from_feat.features.size(); ++i)
    CHECK(from_feat.features.data()[i] == from_rec.features.data()[i]);

  io::Manifest broken = rec;
  broken.entries[0].file = "rec/missing.bin";
  io::write_manifest(dir / "broken.json", broken);
  try {
    load_feature_table(dir / "broken.json", c.pipeline, 1);
    FAIL("expected io error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "extract");
    CHECK(e.kind() == ErrorKind::io);
  }
}

TEST_CASE("format_number is fixed and locale free") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(97.5) == "97.5");
  CHECK(format_number(1.0 / 3) == "0.3333333333");
}
