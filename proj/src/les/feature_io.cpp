#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "lesvote/dataset_io.hpp"
#include "lesvote/error.hpp"

namespace lesvote::io {

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse(const std::string& s, const std::filesystem::path& path) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorKind::io,
          path.string() + ": malformed field '" + s + "'");
  return v;
}

}  // namespace

void write_features_csv(const std::filesystem::path& path, const les::FeatureVector& features) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << "block_index,freq_lo,freq_hi,les_value\n";
  for (const auto& f : features.features) {
    out << f.block_index << ',' << fmt(f.freq_lo) << ',' << fmt(f.freq_hi) << ',' << fmt(f.value)
        << '\n';
  }
}

les::FeatureVector read_features_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) &&
              line == "block_index,freq_lo,freq_hi,les_value",
          ErrorKind::io, path.string() + ": missing feature CSV header");
  les::FeatureVector fv;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    require(fields.size() == 4, ErrorKind::io, path.string() + ": expected 4 fields per row");
    les::LesFeature f;
    f.block_index = parse<std::size_t>(fields[0], path);
    f.freq_lo = parse<double>(fields[1], path);
    f.freq_hi = parse<double>(fields[2], path);
    f.value = parse<double>(fields[3], path);
    require(f.block_index == fv.features.size(), ErrorKind::io,
            path.string() + ": block indices must run 0..n-1 without gaps");
    fv.features.push_back(f);
  }
  require(!fv.features.empty(), ErrorKind::io, path.string() + ": no feature rows");
  return fv;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  nlohmann::json j;
  j["kind"] = manifest.kind;
  j["class_names"] = manifest.class_names;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : manifest.entries) j["entries"].push_back({{"file", e.file}, {"label", e.label}});
  j["metadata"] = manifest.metadata;
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  Manifest m;
  try {
    const auto j = nlohmann::json::parse(in);
    m.kind = j.at("kind").get<std::string>();
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    for (const auto& e : j.at("entries")) {
      m.entries.push_back({e.at("file").get<std::string>(), e.at("label").get<std::string>()});
    }
    if (j.contains("metadata")) m.metadata = j["metadata"];
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, path.string() + ": " + e.what());
  }
  for (const auto& e : m.entries) {
    require(std::find(m.class_names.begin(), m.class_names.end(), e.label) != m.class_names.end(),
            ErrorKind::io, path.string() + ": entry label '" + e.label + "' not in class_names");
  }
  return m;
}

}  // namespace lesvote::io
