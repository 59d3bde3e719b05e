#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "lesvote/error.hpp"
#include "lesvote/experiment.hpp"

namespace lesvote::experiment {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json confusion_json(const ml::ConfusionMatrix& c) {
  auto rows = nlohmann::json::array();
  for (std::size_t p = 0; p < c.num_classes; ++p) {
    std::vector<std::size_t> row;
    for (std::size_t a = 0; a < c.num_classes; ++a) row.push_back(c(p, a));
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> column(const std::vector<const nlohmann::json*>& results, const char* key) {
  std::vector<double> v;
  for (const auto* r : results)
    if (!r->at(key).is_null()) v.push_back(r->at(key).get<double>());
  return v;
}

nlohmann::json summary_json(const std::vector<double>& values) {
  if (values.empty()) return nullptr;
  const auto s = ml::summarize(values);
  return {{"mean", s.mean}, {"std", s.stddev}, {"mse", s.mse}};
}

std::string cell(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_number()) return std::to_string(v.get<long long>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.get<std::string>();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorKind::io, "failed writing " + path.string());
}

std::string file_safe(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) c = '_';
  return s;
}

}  // namespace

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["config"] = report.config;
  j["seed"] = report.config.value("seed", std::uint64_t{0});
  j["data"] = {{"num_recordings", report.num_recordings},
               {"num_features", report.num_features},
               {"blocks_with_zeroed_rows", report.blocks_with_zeroed_rows}};
  const auto& part = report.partition;
  nlohmann::json pj;
  pj["m"] = part.m();
  auto sizes = nlohmann::json::array();
  auto ranges = nlohmann::json::array();
  for (std::size_t i = 0; i < part.m(); ++i) {
    sizes.push_back(part.band_size(i));
    ranges.push_back({part.ranges[i].first, part.ranges[i].second});
  }
  pj["sizes"] = sizes;
  pj["feature_ranges"] = ranges;
  auto hz = nlohmann::json::array();
  for (const auto& [lo, hi] : part.band_hz) hz.push_back({lo, hi});
  pj["band_ranges_hz"] = hz;
  j["partition"] = pj;

  auto cases = nlohmann::json::array();
  for (const auto& c : report.cases) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["class_names"] = c.class_names;
    cj["label_codes"] = c.label_codes;
    cj["positive_class"] = c.class_names[static_cast<std::size_t>(c.positive_class)];
    auto reps = nlohmann::json::array();
    // (classifier, condition) -> per-repetition result objects, in first-seen order.
    std::vector<std::pair<std::string, std::string>> cells;
    for (const auto& r : c.repetitions) {
      nlohmann::json rj;
      rj["index"] = r.index;
      rj["seed"] = r.seed;
      rj["train"] = r.split.train;
      rj["test"] = r.split.test;
      auto results = nlohmann::json::array();
      for (const auto& run : r.runs) {
        for (const auto& cond : run.conditions) {
          nlohmann::json res;
          res["classifier"] = run.classifier;
          res["condition"] = cond.condition;
          res["accuracy"] = cond.evaluation.accuracy;
          res["sensitivity"] = optional_json(cond.evaluation.sensitivity);
          res["specificity"] = optional_json(cond.evaluation.specificity);
          res["feature_dim"] = cond.feature_dim;
          res["confusion"] = confusion_json(cond.evaluation.confusion);
          if (cond.weights) res["weights"] = voting::to_json(*cond.weights, part);
          if (cond.levels) res["augmentation"] = augment::to_json(*cond.levels, part);
          results.push_back(res);
          const std::pair<std::string, std::string> key{run.classifier, cond.condition};
          if (std::find(cells.begin(), cells.end(), key) == cells.end()) cells.push_back(key);
        }
      }
      rj["results"] = results;
      reps.push_back(rj);
    }
    cj["repetitions"] = reps;

    auto aggregate = nlohmann::json::array();
    for (const auto& [clf, cond] : cells) {
      std::vector<const nlohmann::json*> rows;
      for (const auto& rj : reps)
        for (const auto& res : rj["results"])
          if (res["classifier"] == clf && res["condition"] == cond) rows.push_back(&res);
      aggregate.push_back({{"classifier", clf},
                           {"condition", cond},
                           {"repetitions", rows.size()},
                           {"accuracy", summary_json(column(rows, "accuracy"))},
                           {"sensitivity", summary_json(column(rows, "sensitivity"))},
                           {"specificity", summary_json(column(rows, "specificity"))}});
    }
    cj["aggregate"] = aggregate;
    cases.push_back(cj);
  }
  j["cases"] = cases;
  return j;
}

std::string metrics_csv(const nlohmann::json& report) {
  std::ostringstream out;
  out << "case,classifier,condition,repetition,accuracy,sensitivity,specificity,accuracy_std,"
         "accuracy_mse\n";
  for (const auto& c : report.at("cases")) {
    const auto name = c.at("name").get<std::string>();
    for (const auto& r : c.at("repetitions")) {
      for (const auto& res : r.at("results")) {
        out << name << ',' << cell(res["classifier"]) << ',' << cell(res["condition"]) << ','
            << r.at("index").get<std::size_t>() << ',' << cell(res["accuracy"]) << ','
            << cell(res["sensitivity"]) << ',' << cell(res["specificity"]) << ",,\n";
      }
    }
    for (const auto& a : c.at("aggregate")) {
      auto mean = [&](const char* key) {
        return a.at(key).is_null() ? std::string() : cell(a.at(key).at("mean"));
      };
      out << name << ',' << cell(a["classifier"]) << ',' << cell(a["condition"]) << ",mean,"
          << mean("accuracy") << ',' << mean("sensitivity") << ',' << mean("specificity") << ','
          << cell(a.at("accuracy").at("std")) << ',' << cell(a.at("accuracy").at("mse")) << '\n';
    }
  }
  return out.str();
}

std::string weights_csv(const nlohmann::json& report) {
  std::ostringstream out;
  out << "case,classifier,method,repetition,band,band_lo_hz,band_hi_hz,w,W,level,fell_back\n";
  const auto& hz = report.at("partition").at("band_ranges_hz");
  for (const auto& c : report.at("cases")) {
    const auto name = c.at("name").get<std::string>();
    for (const auto& r : c.at("repetitions")) {
      for (const auto& res : r.at("results")) {
        if (!res.contains("weights")) continue;
        const auto& w = res["weights"];
        const auto& levels = res["augmentation"]["levels"];
        for (std::size_t b = 0; b < w["w"].size(); ++b) {
          out << name << ',' << cell(res["classifier"]) << ',' << cell(w["method"]) << ','
              << r.at("index").get<std::size_t>() << ',' << b << ','
              << (b < hz.size() ? cell(hz[b][0]) : "") << ','
              << (b < hz.size() ? cell(hz[b][1]) : "") << ',' << cell(w["w"][b]) << ','
              << cell(w["W"][b]) << ',' << cell(levels[b]) << ',' << cell(w["fell_back"]) << '\n';
        }
      }
    }
  }
  return out.str();
}

std::string confusion_csv(const nlohmann::json& report) {
  std::ostringstream out;
  out << "case,classifier,condition,repetition,predicted,actual,count\n";
  for (const auto& c : report.at("cases")) {
    const auto name = c.at("name").get<std::string>();
    const auto classes = c.at("class_names").get<std::vector<std::string>>();
    for (const auto& r : c.at("repetitions")) {
      for (const auto& res : r.at("results")) {
        const auto& conf = res["confusion"];
        for (std::size_t p = 0; p < conf.size(); ++p)
          for (std::size_t a = 0; a < conf[p].size(); ++a)
            out << name << ',' << cell(res["classifier"]) << ',' << cell(res["condition"]) << ','
                << r.at("index").get<std::size_t>() << ',' << classes[p] << ',' << classes[a]
                << ',' << conf[p][a].get<std::size_t>() << '\n';
      }
    }
  }
  return out.str();
}

std::string accuracy_table_csv(const nlohmann::json& report) {
  std::ostringstream out;
  out << "case,classifier,original,constrained,unconstrained\n";
  for (const auto& c : report.at("cases")) {
    std::vector<std::string> classifiers;
    std::map<std::pair<std::string, std::string>, std::string> cells;
    for (const auto& a : c.at("aggregate")) {
      const auto clf = a.at("classifier").get<std::string>();
      if (std::find(classifiers.begin(), classifiers.end(), clf) == classifiers.end())
        classifiers.push_back(clf);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f +/- %.2f", a.at("accuracy").at("mean").get<double>(),
                    a.at("accuracy").at("std").get<double>());
      cells[{clf, a.at("condition").get<std::string>()}] = buf;
    }
    for (const auto& clf : classifiers) {
      out << c.at("name").get<std::string>() << ',' << clf;
      for (const char* cond : {"original", "constrained", "unconstrained"}) {
        const auto it = cells.find({clf, cond});
        out << ',' << (it == cells.end() ? "" : it->second);
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string category_table_csv(const nlohmann::json& report, const std::string& case_name) {
  for (const auto& c : report.at("cases")) {
    if (c.at("name") != case_name) continue;
    const auto classes = c.at("class_names").get<std::vector<std::string>>();
    const std::size_t k = classes.size();
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> sums;
    for (const auto& r : c.at("repetitions")) {
      for (const auto& res : r.at("results")) {
        const std::pair<std::string, std::string> key{res["classifier"], res["condition"]};
        auto [it, fresh] = sums.try_emplace(key, std::vector<std::size_t>(k * k, 0));
        if (fresh) order.push_back(key);
        for (std::size_t p = 0; p < k; ++p)
          for (std::size_t a = 0; a < k; ++a) it->second[p * k + a] += res["confusion"][p][a].get<std::size_t>();
      }
    }
    std::ostringstream out;
    out << "classifier,condition,predicted";
    for (const auto& name : classes) out << ',' << name;
    out << '\n';
    for (const auto& key : order) {
      const auto& m = sums[key];
      for (std::size_t p = 0; p < k; ++p) {
        out << key.first << ',' << key.second << ',' << classes[p];
        for (std::size_t a = 0; a < k; ++a) out << ',' << m[p * k + a];
        out << '\n';
      }
    }
    return out.str();
  }
  fail(ErrorKind::parameter, "report has no case '" + case_name + "'");
}

std::string emit_weight_profile(const nlohmann::json& report, const std::string& case_name,
                                const std::string& classifier) {
  std::ostringstream out;
  out << "band_lo_hz,band_hi_hz,W_constrained_mean,W_unconstrained_mean\n";
  const auto& hz = report.at("partition").at("band_ranges_hz");
  std::map<std::string, std::vector<double>> sums;
  std::map<std::string, std::size_t> counts;
  for (const auto& c : report.at("cases")) {
    if (c.at("name") != case_name) continue;
    for (const auto& r : c.at("repetitions")) {
      for (const auto& res : r.at("results")) {
        if (res["classifier"] != classifier || !res.contains("weights")) continue;
        const auto method = res["weights"]["method"].get<std::string>();
        const auto W = res["weights"]["W"].get<std::vector<double>>();
        auto& s = sums[method];
        if (s.empty()) s.assign(W.size(), 0.0);
        for (std::size_t b = 0; b < W.size(); ++b) s[b] += W[b];
        ++counts[method];
      }
    }
  }
  if (sums.empty()) return out.str();
  const std::size_t m = sums.begin()->second.size();
  for (std::size_t b = 0; b < m; ++b) {
    out << (b < hz.size() ? cell(hz[b][0]) : "") << ',' << (b < hz.size() ? cell(hz[b][1]) : "");
    for (const char* method : {"constrained", "unconstrained"}) {
      const auto it = sums.find(method);
      out << ',';
      if (it != sums.end()) out << format_number(it->second[b] / static_cast<double>(counts[method]));
    }
    out << '\n';
  }
  return out.str();
}

void write_outputs(const nlohmann::json& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());

  auto stamped = report;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char ts[32];
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", &tm);
  stamped["generated_at"] = ts;
  write_text(dir / "report.json", stamped.dump(2) + "\n");
  write_text(dir / "metrics.csv", metrics_csv(report));
  write_text(dir / "weights.csv", weights_csv(report));
  write_text(dir / "confusion.csv", confusion_csv(report));
  write_text(dir / "accuracy_table.csv", accuracy_table_csv(report));
  for (const auto& c : report.at("cases")) {
    const auto name = c.at("name").get<std::string>();
    write_text(dir / ("category_table_" + file_safe(name) + ".csv"), category_table_csv(report, name));
    std::vector<std::string> classifiers;
    for (const auto& a : c.at("aggregate")) {
      const auto clf = a.at("classifier").get<std::string>();
      if (std::find(classifiers.begin(), classifiers.end(), clf) == classifiers.end())
        classifiers.push_back(clf);
    }
    for (const auto& clf : classifiers)
      write_text(dir / ("weight_profile_" + file_safe(name) + "_" + file_safe(clf) + ".csv"),
                 emit_weight_profile(report, name, clf));
  }
}

}  // namespace lesvote::experiment
