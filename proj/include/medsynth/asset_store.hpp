#pragma once

#include <vector>

#include "medsynth/assets.hpp"
#include "medsynth/config_io.hpp"
#include "medsynth/scene.hpp"

namespace medsynth {

// Everything a frame render needs, loaded once and immutable afterwards.
// Garment lists are index-aligned with config.garment_files, so the indices
// the composer sampled resolve to the same assets on every run.
struct AssetStore {
  ParametricBody body;
  std::array<std::vector<ClothingAsset>, kGarmentClassCount> garments;
  std::vector<Image8> human_textures;
  std::vector<Image8> backgrounds;
  std::vector<Image8> distractor_textures;
  std::vector<StaticMesh> room_meshes;
};

inline AssetStore load_asset_store(const RandomizationConfig& config) {
  AssetStore store;
  store.body = load_body(config.body_asset);
  if (!config.shape_table.empty() &&
      config.shape_coeff_count != store.body.shape_basis.num_coeffs)
    throw ConfigError("shape_table width does not match the body's shape basis");

  for (int g = 0; g < kGarmentClassCount; ++g) {
    for (const auto& file : config.garment_files[g]) {
      ClothingAsset asset = load_garment(file);
      if (asset.class_label != static_cast<GarmentClass>(g))
        throw AssetError("registry index lists " + file + " under the wrong class");
      bind_garment(asset, store.body, config.palette);
      store.garments[g].push_back(std::move(asset));
    }
  }

  auto load_pool = [](const std::vector<std::string>& files) {
    std::vector<Image8> pool;
    pool.reserve(files.size());
    for (const auto& f : files) {
      if (!fs::exists(f)) throw AssetError("texture missing: " + f);
      pool.push_back(load_png_rgb8(f));
    }
    return pool;
  };
  store.human_textures = load_pool(config.human_textures);
  store.backgrounds = load_pool(config.backgrounds);
  store.distractor_textures = load_pool(config.distractors.textures);
  for (const auto& f : config.room.mesh_files) store.room_meshes.push_back(load_static_mesh(f));
  return store;
}

}  // namespace medsynth
