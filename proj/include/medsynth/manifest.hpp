#pragma once

#include <set>
#include <string>
#include <vector>

#include "medsynth/assets.hpp"

namespace medsynth {

// One dataset frame on disk. Paths are relative to the manifest directory.
struct ManifestEntry {
  int frame_index = 0;
  std::string split = "train";  // train | val | test
  std::string mode = "DR";      // DR | SDR | MR | REAL
  std::string group;            // optional person/group key for grouped splits
  std::string image;
  std::string depth;
  std::string class_seg;
  std::string instance_seg;
  std::string annotation;
};

struct DatasetManifest {
  std::string name;
  std::vector<std::string> classes{detection_class_names().begin(), detection_class_names().end()};
  std::vector<ManifestEntry> entries;

  void validate() const {
    std::set<int> seen;
    for (const auto& e : entries) {
      if (!seen.insert(e.frame_index).second)
        throw ValidationError("manifest: duplicate frame_index " + std::to_string(e.frame_index));
      if (e.split != "train" && e.split != "val" && e.split != "test")
        throw ValidationError("manifest: bad split tag '" + e.split + "'");
    }
  }
};

inline json manifest_to_json(const DatasetManifest& m) {
  json j;
  j["name"] = m.name;
  j["classes"] = m.classes;
  json entries = json::array();
  for (const auto& e : m.entries) {
    json je = {{"frame_index", e.frame_index}, {"split", e.split},   {"mode", e.mode},
               {"image", e.image},             {"depth", e.depth},   {"class_seg", e.class_seg},
               {"instance_seg", e.instance_seg}, {"annotation", e.annotation}};
    if (!e.group.empty()) je["group"] = e.group;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j;
}

inline void save_manifest(const fs::path& path, const DatasetManifest& m) {
  m.validate();
  save_json_file(path, manifest_to_json(m));
}

inline DatasetManifest load_manifest(const fs::path& path) {
  json j = load_json_file(path);
  DatasetManifest m;
  m.name = j.value("name", "");
  if (j.contains("classes")) m.classes = j.at("classes").get<std::vector<std::string>>();
  for (const auto& je : j.at("entries")) {
    ManifestEntry e;
    e.frame_index = je.at("frame_index").get<int>();
    e.split = je.value("split", "train");
    e.mode = je.value("mode", "REAL");
    e.group = je.value("group", "");
    e.image = je.value("image", "");
    e.depth = je.value("depth", "");
    e.class_seg = je.value("class_seg", "");
    e.instance_seg = je.value("instance_seg", "");
    e.annotation = je.value("annotation", "");
    m.entries.push_back(std::move(e));
  }
  m.validate();
  return m;
}

// Every referenced file must exist; annotations must parse.
inline void check_manifest_integrity(const fs::path& manifest_path, const DatasetManifest& m) {
  fs::path dir = fs::absolute(manifest_path).parent_path();
  for (const auto& e : m.entries) {
    for (const std::string* rel : {&e.image, &e.depth, &e.class_seg, &e.instance_seg, &e.annotation}) {
      if (rel->empty()) continue;
      if (!fs::exists(dir / *rel))
        throw ValidationError("manifest references missing file: " + (dir / *rel).string());
    }
    if (!e.annotation.empty()) load_json_file(dir / e.annotation);
  }
}

}  // namespace medsynth
