#include "lesvote/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <random>

#include "lesvote/dataset_io.hpp"
#include "lesvote/error.hpp"
#include "lesvote/parallel.hpp"
#include "lesvote/recording_io.hpp"
#include "lesvote/seed.hpp"

namespace lesvote::experiment {

namespace {

template <class F>
auto staged(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

// Fills `table` from per-recording feature vectors produced by `make`.
template <class Make>
void fill_table(FeatureTable& table, std::size_t count, std::size_t jobs, Make&& make,
                const ProgressHook& progress) {
  std::vector<les::FeatureVector> rows(count);
  std::atomic<std::size_t> done{0};
  parallel_for(count, jobs, [&](std::size_t i) {
    rows[i] = make(i);
    const std::size_t d = ++done;
    if (progress && (d % 10 == 0 || d == count))
      progress("extracted " + std::to_string(d) + "/" + std::to_string(count));
  });
  require(count > 0, ErrorKind::insufficient_data, "no recordings");
  const std::size_t dim = rows.front().size();
  table.features = Matrix(count, dim);
  for (std::size_t i = 0; i < count; ++i) {
    require(rows[i].size() == dim, ErrorKind::shape,
            "recording " + std::to_string(i) + " yields a different feature count");
    const auto v = rows[i].values();
    std::copy(v.begin(), v.end(), table.features.row(i).begin());
    table.blocks_with_zeroed_rows += rows[i].blocks_with_zeroed_rows();
  }
  table.layout = rows.front();
}

}  // namespace

FeatureTable extract_feature_table(const synth::SynthSpec& spec, const les::PipelineParams& p,
                                   std::size_t jobs, const ProgressHook& progress) {
  return staged("extract", [&] {
    spec.validate();
    FeatureTable table;
    table.class_names = spec.class_names;
    const std::size_t n = spec.num_recordings();
    for (std::size_t i = 0; i < n; ++i) {
      table.labels.push_back(synth::label_of(spec, i));
      table.sources.push_back("synth:" + std::to_string(i));
    }
    fill_table(
        table, n, jobs,
        [&](std::size_t i) { return les::recording_features(synth::generate_recording(spec, i), p); },
        progress);
    return table;
  });
}

FeatureTable load_feature_table(const std::filesystem::path& manifest_path,
                                const les::PipelineParams& p, std::size_t jobs,
                                const ProgressHook& progress) {
  return staged("extract", [&] {
    const auto manifest = io::read_manifest(manifest_path);
    const auto base = manifest_path.parent_path();
    FeatureTable table;
    table.class_names = manifest.class_names;
    for (const auto& e : manifest.entries) {
      const auto it = std::find(manifest.class_names.begin(), manifest.class_names.end(), e.label);
      table.labels.push_back(static_cast<int>(it - manifest.class_names.begin()));
      table.sources.push_back(e.file);
    }
    const bool features = manifest.kind == "features";
    require(features || manifest.kind == "recordings", ErrorKind::io,
            "manifest kind must be 'recordings' or 'features'");
    fill_table(
        table, manifest.entries.size(), jobs,
        [&](std::size_t i) {
          const auto path = base / manifest.entries[i].file;
          try {
            if (features) return io::read_features_csv(path);
            return les::recording_features(io::read_recording(path), p);
          } catch (const Error& err) {
            throw Error(err.kind(), path.string() + ": " + err.what());
          }
        },
        progress);
    return table;
  });
}

FeatureTable feature_table(const ExperimentConfig& config, const ProgressHook& progress) {
  if (config.source.kind == DataSource::Kind::synth)
    return extract_feature_table(config.source.synth, config.pipeline, config.jobs, progress);
  return load_feature_table(config.source.manifest, config.pipeline, config.jobs, progress);
}

ml::LabeledDataset case_dataset(const FeatureTable& table, const std::vector<std::string>& classes) {
  std::vector<int> remap(table.class_names.size(), -1);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto it = std::find(table.class_names.begin(), table.class_names.end(), classes[c]);
    require(it != table.class_names.end(), ErrorKind::parameter,
            "class '" + classes[c] + "' is not in the data");
    remap[static_cast<std::size_t>(it - table.class_names.begin())] = static_cast<int>(c);
  }
  std::vector<std::size_t> rows;
  ml::LabeledDataset out;
  out.class_names = classes;
  for (std::size_t r = 0; r < table.labels.size(); ++r) {
    const int mapped = remap[static_cast<std::size_t>(table.labels[r])];
    if (mapped < 0) continue;
    rows.push_back(r);
    out.labels.push_back(mapped);
  }
  out.features = Matrix(rows.size(), table.features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = table.features.row(rows[i]);
    std::copy(src.begin(), src.end(), out.features.row(i).begin());
  }
  return out;
}

Split draw_split(std::span<const int> labels, std::size_t num_classes, std::size_t train_per_class,
                 std::size_t test_per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Split s;
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t r = 0; r < labels.size(); ++r)
      if (labels[r] == static_cast<int>(c)) members.push_back(r);
    require(members.size() >= train_per_class + test_per_class, ErrorKind::insufficient_data,
            "class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                " samples, need " + std::to_string(train_per_class + test_per_class));
    std::shuffle(members.begin(), members.end(), rng);
    s.train.insert(s.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(train_per_class));
    s.test.insert(s.test.end(), members.begin() + static_cast<std::ptrdiff_t>(train_per_class),
                  members.begin() + static_cast<std::ptrdiff_t>(train_per_class + test_per_class));
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

namespace {

voting::LabelEncoding case_encoding(const ExperimentConfig& config,
                                    const std::vector<std::string>& classes) {
  if (config.label_codes.empty()) return voting::default_encoding(classes);
  voting::LabelEncoding enc;
  for (const auto& name : classes) {
    const auto it = config.label_codes.find(name);
    require(it != config.label_codes.end(), ErrorKind::parameter,
            "label_codes has no entry for class '" + name + "'");
    enc.codes.push_back(it->second);
  }
  return enc;
}

ml::Evaluation train_and_score(const ml::LabeledDataset& train, const Matrix& test_x,
                               std::span<const int> test_y, const ml::ClassifierSpec& spec,
                               int positive) {
  const auto model = ml::Classifier::train(train, spec);
  const auto pred = model.predict_rows(test_x);
  return ml::evaluate(pred, test_y, train.num_classes(), positive);
}

RepetitionResult run_repetition(const ExperimentConfig& config, const ml::LabeledDataset& data,
                                const voting::FeaturePartition& partition,
                                const voting::LabelEncoding& encoding, int positive,
                                std::size_t case_index, std::size_t rep) {
  RepetitionResult out;
  out.index = rep;
  out.seed = derive_seed(config.seed, {case_index, rep});
  out.split = staged("split", [&] {
    return draw_split(data.labels, data.num_classes(), config.train_per_class,
                      config.test_per_class, out.seed);
  });
  const auto train = data.rows(out.split.train);
  const auto test = data.rows(out.split.test);
  const auto targets = voting::encode_targets(train.labels, encoding);

  for (std::size_t k = 0; k < config.classifiers.size(); ++k) {
    const auto& spec = config.classifiers[k];
    ClassifierRun run;
    run.classifier = ml::to_string(spec.kind);

    ConditionResult original;
    original.condition = "original";
    original.feature_dim = data.dim();
    original.evaluation = staged("classify", [&] {
      return train_and_score(train, test.features, test.labels, spec, positive);
    });
    run.conditions.push_back(std::move(original));

    const auto labels = staged("weights", [&] {
      return voting::out_of_fold_label_matrix(train, partition, spec, encoding, config.inner_folds,
                                              derive_seed(out.seed, {k, 1}));
    });
    for (auto method : config.methods) {
      ConditionResult cond;
      cond.condition = voting::to_string(method);
      cond.weights = staged("weights", [&] { return voting::fit_weights(labels, targets, method); });
      cond.levels = staged("augment", [&] { return augment::discretize(cond.weights->W, config.num_levels); });
      auto aug_train = train;
      aug_train.features = staged("augment", [&] {
        return augment::augment_rows(train.features, partition, *cond.levels);
      });
      const auto aug_test = augment::augment_rows(test.features, partition, *cond.levels);
      cond.feature_dim = aug_train.dim();
      cond.evaluation = staged("classify", [&] {
        return train_and_score(aug_train, aug_test, test.labels, spec, positive);
      });
      run.conditions.push_back(std::move(cond));
    }
    out.runs.push_back(std::move(run));
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, const FeatureTable& table,
                                const ProgressHook& progress) {
  staged("config", [&] { config.validate(); });
  ExperimentReport report;
  report.config = to_json(config);
  report.num_recordings = table.labels.size();
  report.num_features = table.features.cols();
  report.blocks_with_zeroed_rows = table.blocks_with_zeroed_rows;
  report.partition = staged("weights", [&] {
    return table.layout.size() == table.features.cols()
               ? voting::partition_features(table.layout, config.m)
               : voting::partition_features(table.features.cols(), config.m);
  });

  for (std::size_t ci = 0; ci < config.cases.size(); ++ci) {
    const auto& classes = config.cases[ci];
    CaseResult cr;
    cr.class_names = classes;
    for (std::size_t i = 0; i < classes.size(); ++i) cr.name += (i ? "-" : "") + classes[i];
    const auto data = staged("split", [&] { return case_dataset(table, classes); });
    const auto encoding = staged("config", [&] { return case_encoding(config, classes); });
    cr.label_codes = encoding.codes;
    const auto pos = std::find(classes.begin(), classes.end(), config.positive_class);
    cr.positive_class = pos == classes.end() ? 0 : static_cast<int>(pos - classes.begin());

    cr.repetitions.resize(config.repetitions);
    std::atomic<std::size_t> done{0};
    parallel_for(config.repetitions, config.jobs, [&](std::size_t rep) {
      cr.repetitions[rep] =
          run_repetition(config, data, report.partition, encoding, cr.positive_class, ci, rep);
      const std::size_t d = ++done;
      if (progress) progress(cr.name + ": repetition " + std::to_string(d) + "/" +
                             std::to_string(config.repetitions));
    });
    report.cases.push_back(std::move(cr));
  }
  return report;
}

}  // namespace lesvote::experiment
