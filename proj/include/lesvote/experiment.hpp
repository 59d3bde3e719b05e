#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lesvote/augment.hpp"
#include "lesvote/classifiers.hpp"
#include "lesvote/les.hpp"
#include "lesvote/synth.hpp"
#include "lesvote/voting.hpp"

namespace lesvote::experiment {

struct DataSource {
  enum class Kind { synth, manifest };
  Kind kind = Kind::synth;
  synth::SynthSpec synth;
  std::filesystem::path manifest;  // recordings or features manifest
};

struct ExperimentConfig {
  std::string profile = "tiny";
  DataSource source;
  les::PipelineParams pipeline;
  std::vector<std::vector<std::string>> cases;  // class subsets, each run separately
  std::size_t m = 8;
  std::vector<voting::FitMethod> methods{voting::FitMethod::constrained,
                                         voting::FitMethod::unconstrained};
  std::vector<ml::ClassifierSpec> classifiers;
  std::size_t repetitions = 20;
  std::size_t train_per_class = 30;
  std::size_t test_per_class = 10;
  std::size_t num_levels = 5;
  std::size_t inner_folds = 5;
  std::map<std::string, double> label_codes;  // overrides the default encoding
  std::string positive_class = "HC";
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  std::size_t jobs = 1;

  /// Throws ErrorKind::parameter.
  void validate() const;
};

/// Defaults for "tiny" or "paper", including the synthetic data source.
ExperimentConfig default_config(const std::string& profile);

nlohmann::json to_json(const ExperimentConfig& config);

/// Fields present in `j` override `base`; a "profile" key resets the base to
/// that profile's defaults first.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base);

nlohmann::json to_json(const les::PipelineParams& p);
les::PipelineParams pipeline_from_json(const nlohmann::json& j, les::PipelineParams base = {});

/// LES features of every recording in the data source.
struct FeatureTable {
  Matrix features;  // one row per recording
  std::vector<int> labels;
  std::vector<std::string> class_names;
  les::FeatureVector layout;  // block layout (values of the first recording)
  std::vector<std::string> sources;
  std::size_t blocks_with_zeroed_rows = 0;
};

using ProgressHook = std::function<void(const std::string&)>;

FeatureTable extract_feature_table(const synth::SynthSpec& spec, const les::PipelineParams& p,
                                   std::size_t jobs, const ProgressHook& progress = {});
FeatureTable load_feature_table(const std::filesystem::path& manifest,
                                const les::PipelineParams& p, std::size_t jobs,
                                const ProgressHook& progress = {});
FeatureTable feature_table(const ExperimentConfig& config, const ProgressHook& progress = {});

/// Restricts the table to `classes` (in that order) and relabels 0..K-1.
ml::LabeledDataset case_dataset(const FeatureTable& table, const std::vector<std::string>& classes);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per-class random draw of disjoint train and test indices.
Split draw_split(std::span<const int> labels, std::size_t num_classes, std::size_t train_per_class,
                 std::size_t test_per_class, std::uint64_t seed);

struct ConditionResult {
  std::string condition;  // "original", "constrained" or "unconstrained"
  ml::Evaluation evaluation;
  std::optional<voting::WeightVector> weights;
  std::optional<augment::WeightLevels> levels;
  std::size_t feature_dim = 0;
};

struct ClassifierRun {
  std::string classifier;
  std::vector<ConditionResult> conditions;
};

struct RepetitionResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Split split;
  std::vector<ClassifierRun> runs;
};

struct CaseResult {
  std::string name;  // class names joined by '-'
  std::vector<std::string> class_names;
  std::vector<double> label_codes;
  int positive_class = 0;
  std::vector<RepetitionResult> repetitions;
};

struct ExperimentReport {
  nlohmann::json config;
  voting::FeaturePartition partition;
  std::size_t num_recordings = 0;
  std::size_t num_features = 0;
  std::size_t blocks_with_zeroed_rows = 0;
  std::vector<CaseResult> cases;
};

ExperimentReport run_experiment(const ExperimentConfig& config, const FeatureTable& table,
                                const ProgressHook& progress = {});

/// Deterministic report content (no timestamp).
nlohmann::json to_json(const ExperimentReport& report);

// Table writers consume the JSON form so they can be regenerated from a
// saved report.json.
std::string metrics_csv(const nlohmann::json& report);
std::string weights_csv(const nlohmann::json& report);
std::string confusion_csv(const nlohmann::json& report);
/// Mean ± std accuracy per case and classifier, one column per condition.
std::string accuracy_table_csv(const nlohmann::json& report);
/// Confusion counts of one case summed over repetitions: one row per
/// (classifier, condition, predicted label), one column per actual label.
std::string category_table_csv(const nlohmann::json& report, const std::string& case_name);
/// band_lo_hz,band_hi_hz,W_constrained_mean,W_unconstrained_mean for one
/// case and classifier. Header only when no weights were fitted.
std::string emit_weight_profile(const nlohmann::json& report, const std::string& case_name,
                                const std::string& classifier);

/// Writes report.json (with generated_at) and all CSV tables into `dir`.
void write_outputs(const nlohmann::json& report, const std::filesystem::path& dir);

/// Fixed-precision formatting used by every CSV writer.
std::string format_number(double v);

}  // namespace lesvote::experiment
