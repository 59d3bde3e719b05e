#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "lesvote/les.hpp"

namespace lesvote::io {

// Feature CSV: header "block_index,freq_lo,freq_hi,les_value", one row per block.
void write_features_csv(const std::filesystem::path& path, const les::FeatureVector& features);
les::FeatureVector read_features_csv(const std::filesystem::path& path);

struct ManifestEntry {
  std::string file;  // relative to the manifest's directory
  std::string label;
};

/// JSON manifest binding recording or feature files to class labels.
struct Manifest {
  std::string kind;  // "recordings" or "features"
  std::vector<std::string> class_names;
  std::vector<ManifestEntry> entries;
  nlohmann::json metadata = nlohmann::json::object();
};

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

}  // namespace lesvote::io
