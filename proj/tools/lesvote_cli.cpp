// lesvote: command-line front end for the LES weight-voting pipeline.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lesvote/augment.hpp"
#include "lesvote/dataset_io.hpp"
#include "lesvote/error.hpp"
#include "lesvote/experiment.hpp"
#include "lesvote/parallel.hpp"
#include "lesvote/recording_io.hpp"
#include "lesvote/seed.hpp"
#include "lesvote/simd/kernels.hpp"
#include "lesvote/synth.hpp"
#include "lesvote/voting.hpp"

namespace fs = std::filesystem;
using namespace lesvote;

namespace {

bool g_verbose = false;

void log(const std::string& msg) {
  if (g_verbose) std::cerr << msg << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<std::string> split_classes(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

template <class F>
void stage(const std::string& name, F&& f) {
  try {
    f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

// Common experiment options: profile defaults, then config file, then flags.
struct ExperimentFlags {
  std::string profile = "tiny";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t jobs = 1;

  experiment::ExperimentConfig resolve() const {
    auto c = experiment::default_config(profile);
    if (!config.empty()) c = experiment::config_from_json(read_json(config), c);
    if (seed) c.seed = *seed;
    if (!out.empty()) c.output_dir = out;
    c.jobs = jobs;
    return c;
  }
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--profile", f.profile, "Preset: tiny or paper")
      ->check(CLI::IsMember({"tiny", "paper"}));
  cmd->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void run_synth(const ExperimentFlags& f, const std::string& format) {
  // Accepts an experiment config (its synthetic source) or a bare spec file.
  auto spec = synth::profile(f.profile);
  if (!f.config.empty()) {
    const auto j = read_json(f.config);
    if (j.contains("source") || j.contains("profile")) {
      const auto c = f.resolve();
      require(c.source.kind == experiment::DataSource::Kind::synth, ErrorKind::parameter,
              "config has no synthetic source");
      spec = c.source.synth;
    } else {
      spec = synth::spec_from_json(j.contains("synth") ? j.at("synth") : j);
    }
  }
  if (f.seed) spec.seed = *f.seed;
  const fs::path out = f.out.empty() ? fs::path("out/synth") : fs::path(f.out);
  fs::create_directories(out / "recordings");

  io::Manifest manifest;
  manifest.kind = "recordings";
  manifest.class_names = spec.class_names;
  manifest.metadata["synth"] = synth::to_json(spec);
  const std::size_t n = spec.num_recordings();
  manifest.entries.resize(n);
  stage("synth", [&] {
    spec.validate();
    parallel_for(n, f.jobs, [&](std::size_t i) {
      const auto rec = synth::generate_recording(spec, i);
      char name[64];
      std::snprintf(name, sizeof name, "recordings/rec_%04zu.%s", i, format == "csv" ? "csv" : "bin");
      if (format == "csv") {
        io::write_recording_csv(out / name, rec);
      } else {
        io::write_recording_binary(out / name, rec);
      }
      manifest.entries[i] = {name, *rec.class_label()};
    });
    io::write_manifest(out / "manifest.json", manifest);
  });
  write_json(out / "spec.json", synth::to_json(spec));
  std::cout << "wrote " << n << " recordings to " << out.string() << '\n';
}

void run_extract(const ExperimentFlags& f, const std::string& input) {
  const auto config = f.resolve();
  const fs::path out = f.out.empty() ? fs::path("out/features") : fs::path(f.out);
  const fs::path manifest_path = input;
  const auto manifest = io::read_manifest(manifest_path);
  require(manifest.kind == "recordings", ErrorKind::io, "extract needs a recordings manifest");
  fs::create_directories(out / "features");

  io::Manifest result;
  result.kind = "features";
  result.class_names = manifest.class_names;
  result.metadata["pipeline"] = experiment::to_json(config.pipeline);
  result.entries.resize(manifest.entries.size());
  stage("extract", [&] {
    parallel_for(manifest.entries.size(), f.jobs, [&](std::size_t i) {
      const auto& e = manifest.entries[i];
      const auto rec = io::read_recording(manifest_path.parent_path() / e.file);
      const auto features = les::recording_features(rec, config.pipeline);
      char name[64];
      std::snprintf(name, sizeof name, "features/feat_%04zu.csv", i);
      io::write_features_csv(out / name, features);
      result.entries[i] = {name, e.label};
      if (features.blocks_with_zeroed_rows() > 0)
        log(e.file + ": " + std::to_string(features.blocks_with_zeroed_rows()) +
            " blocks with zero-variance rows");
    });
    io::write_manifest(out / "manifest.json", result);
  });
  std::cout << "extracted " << result.entries.size() << " feature vectors to " << out.string() << '\n';
}

struct FitFlags {
  std::string input;
  std::string classes;
  std::string method = "both";
  std::string classifier = "svm";
  std::size_t m = 8;
  std::size_t num_levels = 5;
};

void run_weights(const ExperimentFlags& f, const FitFlags& w) {
  const auto config = f.resolve();
  const fs::path out = f.out.empty() ? fs::path("out/weights") : fs::path(f.out);
  const auto table = experiment::load_feature_table(w.input, config.pipeline, f.jobs);
  const auto classes = w.classes.empty() ? table.class_names : split_classes(w.classes);
  const auto data = experiment::case_dataset(table, classes);
  ml::ClassifierSpec spec;
  spec.kind = ml::classifier_kind_from_string(w.classifier);

  voting::FeaturePartition partition;
  voting::LabelMatrix labels;
  const auto encoding = voting::default_encoding(classes);
  stage("weights", [&] {
    partition = voting::partition_features(table.layout, w.m);
    labels = voting::out_of_fold_label_matrix(data, partition, spec, encoding, config.inner_folds,
                                              derive_seed(config.seed, {0}));
  });
  const auto targets = voting::encode_targets(data.labels, encoding);
  std::vector<voting::FitMethod> methods;
  if (w.method == "both") {
    methods = {voting::FitMethod::constrained, voting::FitMethod::unconstrained};
  } else {
    methods = {voting::fit_method_from_string(w.method)};
  }
  fs::create_directories(out);
  for (auto method : methods) {
    voting::WeightVector weights;
    augment::WeightLevels levels;
    stage("weights", [&] { weights = voting::fit_weights(labels, targets, method); });
    stage("augment", [&] { levels = augment::discretize(weights.W, w.num_levels); });
    const std::string tag = voting::to_string(method);
    write_json(out / ("weights_" + tag + ".json"), voting::to_json(weights, partition));
    write_json(out / ("augmentation_" + tag + ".json"), augment::to_json(levels, partition));
    std::cout << tag << " W:";
    for (double v : weights.W) std::cout << ' ' << experiment::format_number(v);
    std::cout << (weights.fell_back ? "  (singular, fell back to constrained)" : "") << '\n';
  }
}

void run_classify(const ExperimentFlags& f, const FitFlags& w, const std::string& weights_path) {
  const auto config = f.resolve();
  const fs::path out = f.out.empty() ? fs::path("out/classify") : fs::path(f.out);
  const auto table = experiment::load_feature_table(w.input, config.pipeline, f.jobs);
  const auto classes = w.classes.empty() ? table.class_names : split_classes(w.classes);
  const auto data = experiment::case_dataset(table, classes);
  ml::ClassifierSpec spec;
  spec.kind = ml::classifier_kind_from_string(w.classifier);

  nlohmann::json result;
  stage("classify", [&] {
    const auto split = experiment::draw_split(data.labels, data.num_classes(), config.train_per_class,
                                              config.test_per_class, derive_seed(config.seed, {0, 0}));
    auto train = data.rows(split.train);
    auto test = data.rows(split.test);
    if (!weights_path.empty()) {
      const auto weights = voting::weight_vector_from_json(read_json(weights_path));
      const auto partition = voting::partition_features(table.layout, weights.W.size());
      const auto levels = augment::discretize(weights.W, w.num_levels);
      train.features = augment::augment_rows(train.features, partition, levels);
      test.features = augment::augment_rows(test.features, partition, levels);
      result["augmentation"] = augment::to_json(levels, partition);
    }
    const auto model = ml::Classifier::train(train, spec);
    const auto pred = model.predict_rows(test.features);
    const auto pos = std::find(classes.begin(), classes.end(), config.positive_class);
    const auto ev = ml::evaluate(pred, test.labels, classes.size(),
                                 pos == classes.end() ? 0 : static_cast<int>(pos - classes.begin()));
    result["classifier"] = w.classifier;
    result["class_names"] = classes;
    result["accuracy"] = ev.accuracy;
    result["sensitivity"] = ev.sensitivity ? nlohmann::json(*ev.sensitivity) : nlohmann::json(nullptr);
    result["specificity"] = ev.specificity ? nlohmann::json(*ev.specificity) : nlohmann::json(nullptr);
    auto conf = nlohmann::json::array();
    for (std::size_t p = 0; p < classes.size(); ++p) {
      std::vector<std::size_t> row;
      for (std::size_t a = 0; a < classes.size(); ++a) row.push_back(ev.confusion(p, a));
      conf.push_back(row);
    }
    result["confusion"] = conf;
    result["feature_dim"] = train.dim();
  });
  write_json(out / "classification.json", result);
  std::cout << "accuracy " << experiment::format_number(result["accuracy"].get<double>()) << "%\n";
}

void run_experiment_cmd(const ExperimentFlags& f) {
  const auto config = f.resolve();
  stage("config", [&] { config.validate(); });
  log(std::string("simd kernels: ") + simd::to_string(simd::active_isa()));
  const auto table = experiment::feature_table(config, log);
  const auto report = experiment::run_experiment(config, table, log);
  const auto j = experiment::to_json(report);
  stage("report", [&] { experiment::write_outputs(j, config.output_dir); });
  std::cout << experiment::accuracy_table_csv(j);
  std::cout << "outputs in " << config.output_dir.string() << '\n';
}

void run_report(const std::string& input, const std::string& out) {
  auto j = read_json(input);
  j.erase("generated_at");
  const fs::path dir = out.empty() ? fs::path(input).parent_path() : fs::path(out);
  stage("report", [&] { experiment::write_outputs(j, dir); });
  std::cout << experiment::accuracy_table_csv(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LES feature extraction, band weight voting and augmented classification"};
  app.require_subcommand(1);
  app.add_flag("--verbose,-v", g_verbose, "Progress messages on stderr");

  ExperimentFlags flags;
  FitFlags fit;
  std::string format = "bin";
  std::string input;
  std::string weights_path;

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic recording set");
  add_experiment_flags(synth_cmd, flags);
  synth_cmd->add_option("--format", format, "Recording format")->check(CLI::IsMember({"bin", "csv"}));

  auto* extract_cmd = app.add_subcommand("extract", "Recordings manifest -> LES feature files");
  add_experiment_flags(extract_cmd, flags);
  extract_cmd->add_option("--input", input, "Recordings manifest.json")->required()->check(CLI::ExistingFile);

  auto add_fit = [&](CLI::App* cmd) {
    add_experiment_flags(cmd, flags);
    cmd->add_option("--input", fit.input, "Features manifest.json")->required()->check(CLI::ExistingFile);
    cmd->add_option("--classes", fit.classes, "Comma-separated classes (default: all)");
    cmd->add_option("--classifier", fit.classifier, "svm or knn")->check(CLI::IsMember({"svm", "knn"}));
    cmd->add_option("--m", fit.m, "Number of feature subsets");
    cmd->add_option("--num-levels", fit.num_levels, "Weight discretization levels");
  };
  auto* weights_cmd = app.add_subcommand("weights", "Fit band vote weights on a feature set");
  add_fit(weights_cmd);
  weights_cmd->add_option("--method", fit.method, "constrained, unconstrained or both")
      ->check(CLI::IsMember({"constrained", "unconstrained", "both"}));

  auto* classify_cmd = app.add_subcommand("classify", "Train/test one split, optionally augmented");
  add_fit(classify_cmd);
  classify_cmd->add_option("--weights", weights_path, "weights_*.json from the weights stage")
      ->check(CLI::ExistingFile);

  auto* experiment_cmd = app.add_subcommand("experiment", "Full repeated-split protocol");
  add_experiment_flags(experiment_cmd, flags);

  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Regenerate CSV tables from report.json");
  report_cmd->add_option("--input", input, "report.json")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", report_out, "Output directory (default: next to input)");

  for (auto* cmd : {synth_cmd, extract_cmd, weights_cmd, classify_cmd, experiment_cmd})
    cmd->add_flag("--verbose,-v", g_verbose, "Progress messages on stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) run_synth(flags, format);
    if (*extract_cmd) run_extract(flags, input);
    if (*weights_cmd) run_weights(flags, fit);
    if (*classify_cmd) run_classify(flags, fit, weights_path);
    if (*experiment_cmd) run_experiment_cmd(flags);
    if (*report_cmd) run_report(input, report_out);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
