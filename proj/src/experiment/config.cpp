#include <algorithm>
#include <set>

#include "lesvote/error.hpp"
#include "lesvote/experiment.hpp"

namespace lesvote::experiment {

namespace {

nlohmann::json classifier_to_json(const ml::ClassifierSpec& spec) {
  nlohmann::json j;
  j["kind"] = ml::to_string(spec.kind);
  if (spec.kind == ml::ClassifierKind::knn) {
    j["k"] = spec.knn.k;
    j["standardize"] = spec.knn.standardize;
  } else {
    j["C"] = spec.svm.C;
    j["tol"] = spec.svm.tol;
    j["max_iterations"] = spec.svm.max_iterations;
    j["standardize"] = spec.svm.standardize;
  }
  return j;
}

ml::ClassifierSpec classifier_from_json(const nlohmann::json& j) {
  ml::ClassifierSpec spec;
  if (j.is_string()) {
    spec.kind = ml::classifier_kind_from_string(j.get<std::string>());
    return spec;
  }
  spec.kind = ml::classifier_kind_from_string(j.at("kind").get<std::string>());
  spec.knn.k = j.value("k", spec.knn.k);
  spec.knn.standardize = j.value("standardize", spec.knn.standardize);
  spec.svm.C = j.value("C", spec.svm.C);
  spec.svm.tol = j.value("tol", spec.svm.tol);
  spec.svm.max_iterations = j.value("max_iterations", spec.svm.max_iterations);
  spec.svm.standardize = j.value("standardize", spec.svm.standardize);
  return spec;
}

std::vector<ml::ClassifierSpec> default_classifiers() {
  ml::ClassifierSpec svm;
  svm.kind = ml::ClassifierKind::svm;
  ml::ClassifierSpec knn;
  knn.kind = ml::ClassifierKind::knn;
  return {svm, knn};
}

}  // namespace

nlohmann::json to_json(const les::PipelineParams& p) {
  return {{"band_low_hz", p.band_low_hz},   {"band_high_hz", p.band_high_hz},
          {"freq_start_hz", p.freq_start_hz}, {"freq_end_hz", p.freq_end_hz},
          {"psd_cols", p.psd_cols},           {"block_width", p.block_width}};
}

les::PipelineParams pipeline_from_json(const nlohmann::json& j, les::PipelineParams p) {
  p.band_low_hz = j.value("band_low_hz", p.band_low_hz);
  p.band_high_hz = j.value("band_high_hz", p.band_high_hz);
  p.freq_start_hz = j.value("freq_start_hz", p.freq_start_hz);
  p.freq_end_hz = j.value("freq_end_hz", p.freq_end_hz);
  p.psd_cols = j.value("psd_cols", p.psd_cols);
  p.block_width = j.value("block_width", p.block_width);
  return p;
}

void ExperimentConfig::validate() const {
  require(!cases.empty(), ErrorKind::parameter, "config lists no class cases");
  require(!methods.empty(), ErrorKind::parameter, "config lists no weight methods");
  require(!classifiers.empty(), ErrorKind::parameter, "config lists no classifiers");
  require(repetitions >= 1, ErrorKind::parameter, "repetitions must be positive");
  require(train_per_class >= 1 && test_per_class >= 1, ErrorKind::parameter,
          "train and test counts must be positive");
  require(m >= 2, ErrorKind::parameter, "m must be at least 2");
  require(num_levels >= 1, ErrorKind::parameter, "num_levels must be at least 1");
  require(inner_folds >= 2, ErrorKind::parameter, "inner_folds must be at least 2");
  require(pipeline.block_width >= 1 && pipeline.psd_cols % pipeline.block_width == 0,
          ErrorKind::parameter, "psd_cols must be a multiple of block_width");
  for (const auto& c : cases) {
    require(c.size() >= 2, ErrorKind::parameter, "each case needs at least two classes");
    require(std::set<std::string>(c.begin(), c.end()).size() == c.size(), ErrorKind::parameter,
            "duplicate class in case");
  }
  for (const auto& k : classifiers) {
    if (k.kind == ml::ClassifierKind::knn) {
      require(k.knn.k >= 1, ErrorKind::parameter, "knn k must be positive");
    } else {
      require(k.svm.C > 0, ErrorKind::parameter, "svm C must be positive");
    }
  }
  if (source.kind == DataSource::Kind::synth) {
    source.synth.validate();
    require(source.synth.samples_per_class >= train_per_class + test_per_class,
            ErrorKind::parameter, "train + test per class exceeds synthetic samples per class");
  }
}

ExperimentConfig default_config(const std::string& profile) {
  ExperimentConfig c;
  c.profile = profile;
  c.source.kind = DataSource::Kind::synth;
  c.source.synth = synth::profile(profile);
  c.classifiers = default_classifiers();
  if (profile == "tiny") {
    // Ten-second recordings resolve 0.5 Hz, so 8 blocks (one per band, about
    // 12 PSD bins each) replace the fine default grid.
    c.pipeline.psd_cols = 800;
    c.pipeline.block_width = 100;
    c.cases = {{"HC", "FES"}};
  } else {
    c.cases = {{"HC", "FES"}, {"HC", "CHR", "FES"}};
  }
  c.seed = 1;
  c.output_dir = "out/" + profile;
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["profile"] = c.profile;
  if (c.source.kind == DataSource::Kind::synth) {
    j["source"] = {{"kind", "synth"}, {"synth", synth::to_json(c.source.synth)}};
  } else {
    j["source"] = {{"kind", "manifest"}, {"manifest", c.source.manifest.generic_string()}};
  }
  j["pipeline"] = to_json(c.pipeline);
  j["cases"] = c.cases;
  j["m"] = c.m;
  auto methods = nlohmann::json::array();
  for (auto m : c.methods) methods.push_back(voting::to_string(m));
  j["methods"] = methods;
  auto classifiers = nlohmann::json::array();
  for (const auto& k : c.classifiers) classifiers.push_back(classifier_to_json(k));
  j["classifiers"] = classifiers;
  j["repetitions"] = c.repetitions;
  j["train_per_class"] = c.train_per_class;
  j["test_per_class"] = c.test_per_class;
  j["num_levels"] = c.num_levels;
  j["inner_folds"] = c.inner_folds;
  j["label_codes"] = c.label_codes;
  j["positive_class"] = c.positive_class;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir.generic_string();
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c) {
  try {
    if (j.contains("profile")) c = default_config(j.at("profile").get<std::string>());
    if (j.contains("source")) {
      const auto& s = j.at("source");
      const auto kind = s.value("kind", std::string("synth"));
      if (kind == "synth") {
        c.source.kind = DataSource::Kind::synth;
        if (s.contains("profile")) c.source.synth = synth::profile(s.at("profile").get<std::string>());
        if (s.contains("synth")) c.source.synth = synth::spec_from_json(s.at("synth"));
      } else if (kind == "manifest") {
        c.source.kind = DataSource::Kind::manifest;
        c.source.manifest = s.at("manifest").get<std::string>();
      } else {
        fail(ErrorKind::parameter, "unknown source kind '" + kind + "'");
      }
    }
    if (j.contains("pipeline")) c.pipeline = pipeline_from_json(j.at("pipeline"), c.pipeline);
    if (j.contains("cases")) c.cases = j.at("cases").get<std::vector<std::vector<std::string>>>();
    c.m = j.value("m", c.m);
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods"))
        c.methods.push_back(voting::fit_method_from_string(m.get<std::string>()));
    }
    if (j.contains("classifiers")) {
      c.classifiers.clear();
      for (const auto& k : j.at("classifiers")) c.classifiers.push_back(classifier_from_json(k));
    }
    c.repetitions = j.value("repetitions", c.repetitions);
    c.train_per_class = j.value("train_per_class", c.train_per_class);
    c.test_per_class = j.value("test_per_class", c.test_per_class);
    c.num_levels = j.value("num_levels", c.num_levels);
    c.inner_folds = j.value("inner_folds", c.inner_folds);
    if (j.contains("label_codes")) c.label_codes = j.at("label_codes").get<std::map<std::string, double>>();
    c.positive_class = j.value("positive_class", c.positive_class);
    c.seed = j.value("seed", c.seed);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parameter, std::string("config: ") + e.what());
  }
  if (c.classifiers.empty()) c.classifiers = default_classifiers();
  return c;
}

}  // namespace lesvote::experiment
