#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "dataset.hpp"

namespace attrscope {

struct DatasetManifest {
  std::string name;
  std::filesystem::path attributes_file;
  std::filesystem::path act_file;
  std::filesystem::path prd_file;
  std::filesystem::path fea_file;
  std::optional<std::filesystem::path> images_dir;
};

/// One name per non-empty line; blank lines are skipped.
AttributeCatalog load_attribute_names(const std::filesystem::path& path);

/// Parses manifest.json. Relative paths resolve against the manifest's
/// directory.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Joins act/prd/fea by image id. Record order follows act.csv.
Dataset load_dataset(const DatasetManifest& manifest);

/// Writes attributes.txt, act.csv, prd.csv, fea.csv and manifest.json into
/// `dir`. Values are written in shortest round-trip form so a reload is
/// exact.
DatasetManifest export_dataset(const Dataset& dataset,
                               const std::filesystem::path& dir);

}  // namespace attrscope
