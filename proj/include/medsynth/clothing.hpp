#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "medsynth/body_model.hpp"
#include "medsynth/image.hpp"
#include "medsynth/rng.hpp"

namespace medsynth {

enum class GarmentClass : int { Gown = 0, Shirt, Pants, Hat, Mask, Glove };

inline constexpr int kGarmentClassCount = 6;

// Buffer / annotation class ids. 0 is the human; garments follow in the
// reporting order; ids >= 200 are scene context (distractors, room).
inline constexpr std::uint8_t kClassBody = 0;
inline constexpr std::uint8_t kClassDistractorBase = 200;
inline constexpr std::uint8_t kClassEnvironment = 240;
inline constexpr std::uint8_t kClassBackground = 255;

inline std::uint8_t class_id_of(GarmentClass g) { return static_cast<std::uint8_t>(static_cast<int>(g) + 1); }

inline const std::array<std::string, 7>& detection_class_names() {
  static const std::array<std::string, 7> names = {"body",  "gown", "shirt", "pants",
                                                   "hat",   "mask", "glove"};
  return names;
}

inline std::string garment_class_name(GarmentClass g) {
  return detection_class_names()[static_cast<int>(g) + 1];
}

inline GarmentClass garment_class_from_name(const std::string& name) {
  const auto& names = detection_class_names();
  for (int i = 1; i < 7; ++i)
    if (names[i] == name) return static_cast<GarmentClass>(i - 1);
  throw AssetError("unknown garment class: " + name);
}

enum class SourceKind { Scanned, Designed };

inline std::string source_kind_name(SourceKind k) {
  return k == SourceKind::Scanned ? "scanned" : "designed";
}

inline SourceKind source_kind_from_name(const std::string& name) {
  if (name == "scanned") return SourceKind::Scanned;
  if (name == "designed") return SourceKind::Designed;
  throw AssetError("unknown source kind: " + name);
}

// Medical cloth comes in blue, green and light pink; hue targets here are
// engine defaults, jitter keeps variants from looking cloned. Value is always
// preserved by recoloring; value_scale_* is parsed for forward compatibility
// but unused.
struct PaletteSpec {
  double blue_hue = 210.0;
  double green_hue = 140.0;
  double light_pink_hue = 340.0;
  double hue_jitter = 10.0;  // degrees, +-
  double sat_scale_min = 0.9;
  double sat_scale_max = 1.1;
  double value_scale_min = 1.0;
  double value_scale_max = 1.0;
  double min_saturation = 0.25;

  std::array<double, 3> target_hues() const { return {blue_hue, green_hue, light_pink_hue}; }

  void validate() const {
    for (double h : target_hues())
      if (h < 0.0 || h >= 360.0) throw ConfigError("palette: hue must be in [0,360)");
    if (hue_jitter < 0.0) throw ConfigError("palette: hue jitter must be >= 0");
    if (sat_scale_min > sat_scale_max) throw ConfigError("palette: bad saturation scale range");
  }
};

// A garment bound to the body rig. weights/shape_basis are derived by the
// transfer ops below, palette_variants by recolor_texture.
struct ClothingAsset {
  std::string name;
  TemplateMesh mesh;
  GarmentClass class_label = GarmentClass::Gown;
  SourceKind source_kind = SourceKind::Designed;
  SkinWeights weights;
  ShapeBasis shape_basis;
  Image8 base_texture;
  std::vector<Image8> palette_variants;
  double layer = 1.0;  // multiplies the render-time shell offset
};

namespace detail {

// k nearest body vertices with inverse-distance weights; a coincident vertex
// takes the whole blend. Ties broken by lower vertex index.
struct NearestBlend {
  std::array<int, 3> index{-1, -1, -1};
  std::array<double, 3> weight{0.0, 0.0, 0.0};
  int count = 0;
};

inline NearestBlend nearest_body_blend(const Vec3& p, const std::vector<Vec3>& body_vertices) {
  constexpr int k = 3;
  std::array<int, k> idx{-1, -1, -1};
  std::array<double, k> d2{0.0, 0.0, 0.0};
  int have = 0;
  for (int i = 0; i < static_cast<int>(body_vertices.size()); ++i) {
    double d = (body_vertices[i] - p).squaredNorm();
    int pos = have;
    while (pos > 0 && d < d2[pos - 1]) --pos;
    if (pos < k) {
      for (int m = std::min(have, k - 1); m > pos; --m) {
        idx[m] = idx[m - 1];
        d2[m] = d2[m - 1];
      }
      idx[pos] = i;
      d2[pos] = d;
      if (have < k) ++have;
    }
  }

  NearestBlend out;
  out.count = have;
  for (int m = 0; m < have; ++m) out.index[m] = idx[m];
  if (have > 0 && d2[0] <= 1e-24) {  // coincident: copy exactly
    out.weight[0] = 1.0;
    out.count = 1;
    return out;
  }
  double sum = 0.0;
  for (int m = 0; m < have; ++m) {
    out.weight[m] = 1.0 / std::sqrt(d2[m]);
    sum += out.weight[m];
  }
  for (int m = 0; m < have; ++m) out.weight[m] /= sum;
  return out;
}

}  // namespace detail

// Inverse-distance blend of the 3 nearest body vertices' skin weights,
// truncated to 4 influences and renormalized. Meshes must share the rest
// frame.
inline SkinWeights transfer_weights(const TemplateMesh& garment, const TemplateMesh& body,
                                    const SkinWeights& body_weights) {
  if (garment.vertices.empty() || body.vertices.empty())
    throw AssetError("transfer_weights: empty mesh");
  if (body_weights.vertex_weights.size() != body.vertices.size())
    throw AssetError("transfer_weights: body weights do not cover the body mesh");

  SkinWeights out;
  out.vertex_weights.resize(garment.vertices.size());
  for (std::size_t v = 0; v < garment.vertices.size(); ++v) {
    auto blend = detail::nearest_body_blend(garment.vertices[v], body.vertices);
    std::map<int, double> acc;
    for (int m = 0; m < blend.count; ++m)
      for (const auto& [j, w] : body_weights.vertex_weights[blend.index[m]])
        acc[j] += blend.weight[m] * w;
    std::vector<std::pair<int, double>> inf(acc.begin(), acc.end());
    out.vertex_weights[v] = normalize_influences(std::move(inf));
  }
  return out;
}

// Same blend applied to every displacement field, so the garment deforms in
// lockstep with the body under any shape coefficients.
inline ShapeBasis transfer_blendshapes(const TemplateMesh& garment, const TemplateMesh& body,
                                       const ShapeBasis& body_basis) {
  if (garment.vertices.empty() || body.vertices.empty())
    throw AssetError("transfer_blendshapes: empty mesh");
  body_basis.validate(body.vertices.size());

  ShapeBasis out;
  out.num_coeffs = body_basis.num_coeffs;
  out.displacements.assign(body_basis.num_coeffs,
                           std::vector<Vec3>(garment.vertices.size(), Vec3::Zero()));
  for (std::size_t v = 0; v < garment.vertices.size(); ++v) {
    auto blend = detail::nearest_body_blend(garment.vertices[v], body.vertices);
    for (int k = 0; k < body_basis.num_coeffs; ++k) {
      Vec3 d = Vec3::Zero();
      for (int m = 0; m < blend.count; ++m)
        d += blend.weight[m] * body_basis.displacements[k][blend.index[m]];
      out.displacements[k][v] = d;
    }
  }
  return out;
}

// Recolor toward target_hue: hue replaced (one seeded jitter per call),
// saturation scaled (floored so gray cloth still picks up the color), value
// untouched.
inline Image8 recolor_texture(const Image8& texture, double target_hue, std::uint64_t jitter_seed,
                              const PaletteSpec& palette) {
  if (texture.empty()) throw ValidationError("recolor_texture: empty texture");
  palette.validate();
  Rng rng(mix64(jitter_seed));
  double jitter = palette.hue_jitter > 0.0 ? rng.uniform(-palette.hue_jitter, palette.hue_jitter) : 0.0;
  double sat_scale = palette.sat_scale_min == palette.sat_scale_max
                         ? palette.sat_scale_min
                         : rng.uniform(palette.sat_scale_min, palette.sat_scale_max);
  double hue = target_hue + jitter;

  Image8 out(texture.width, texture.height, 3);
  for (int y = 0; y < texture.height; ++y) {
    for (int x = 0; x < texture.width; ++x) {
      std::uint8_t r = texture.at(x, y, 0);
      std::uint8_t g = texture.channels >= 3 ? texture.at(x, y, 1) : r;
      std::uint8_t b = texture.channels >= 3 ? texture.at(x, y, 2) : r;
      Hsv hsv = rgb_to_hsv(r, g, b);
      double s = std::max(hsv.s * sat_scale, palette.min_saturation);
      auto rgb = hsv_to_rgb(hue, s, hsv.v);
      out.set_rgb(x, y, rgb[0], rgb[1], rgb[2]);
    }
  }
  return out;
}

}  // namespace medsynth
