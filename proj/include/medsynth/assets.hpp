#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "medsynth/body_model.hpp"
#include "medsynth/clothing.hpp"
#include "medsynth/png_io.hpp"

namespace medsynth {

using nlohmann::json;
namespace fs = std::filesystem;

inline json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("bad JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

inline void save_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

// FNV-1a; stable asset-name hashing for derived seeds.
inline std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace detail {

inline json vec3_list(const std::vector<Vec3>& v) {
  json out = json::array();
  for (const Vec3& p : v) out.push_back({p.x(), p.y(), p.z()});
  return out;
}

inline std::vector<Vec3> parse_vec3_list(const json& j, const char* what) {
  std::vector<Vec3> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 3) throw AssetError(std::string(what) + ": expected [x,y,z]");
    out.emplace_back(e[0].get<double>(), e[1].get<double>(), e[2].get<double>());
  }
  return out;
}

inline json mesh_fields(const TemplateMesh& mesh) {
  json j;
  j["vertices"] = vec3_list(mesh.vertices);
  json tris = json::array();
  for (const Tri& t : mesh.triangles) tris.push_back({t[0], t[1], t[2]});
  j["triangles"] = std::move(tris);
  json uvs = json::array();
  for (const Vec2& uv : mesh.uvs) uvs.push_back({uv.x(), uv.y()});
  j["uvs"] = std::move(uvs);
  return j;
}

inline TemplateMesh parse_mesh_fields(const json& j, const std::string& what) {
  TemplateMesh mesh;
  mesh.vertices = parse_vec3_list(j.at("vertices"), "vertices");
  for (const auto& e : j.at("triangles")) {
    if (!e.is_array() || e.size() != 3) throw AssetError(what + ": expected [a,b,c] triangle");
    mesh.triangles.push_back(
        {e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>(), e[2].get<std::uint32_t>()});
  }
  for (const auto& e : j.at("uvs")) {
    if (!e.is_array() || e.size() != 2) throw AssetError(what + ": expected [u,v]");
    mesh.uvs.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  validate_mesh(mesh, what);
  recompute_normals(mesh);
  return mesh;
}

}  // namespace detail

inline void save_body(const fs::path& path, const ParametricBody& body) {
  json j = detail::mesh_fields(body.mesh);
  json basis;
  basis["num_coeffs"] = body.shape_basis.num_coeffs;
  json fields = json::array();
  for (const auto& field : body.shape_basis.displacements)
    fields.push_back(detail::vec3_list(field));
  basis["displacements"] = std::move(fields);
  j["shape_basis"] = std::move(basis);

  json joints = json::array();
  for (const Joint& joint : body.skeleton.joints) {
    joints.push_back({{"name", joint.name},
                      {"parent", joint.parent},
                      {"offset", {joint.offset.x(), joint.offset.y(), joint.offset.z()}}});
  }
  j["skeleton"] = {{"joints", std::move(joints)}};

  json weights = json::array();
  for (const auto& vw : body.skin_weights.vertex_weights) {
    json entry = json::array();
    for (const auto& [joint, w] : vw) entry.push_back({joint, w});
    weights.push_back(std::move(entry));
  }
  j["skin_weights"] = std::move(weights);
  save_json_file(path, j);
}

inline ParametricBody load_body(const fs::path& path) {
  json j = load_json_file(path);
  ParametricBody body;
  body.mesh = detail::parse_mesh_fields(j, "body asset " + path.string());

  const json& basis = j.at("shape_basis");
  body.shape_basis.num_coeffs = basis.at("num_coeffs").get<int>();
  for (const auto& field : basis.at("displacements"))
    body.shape_basis.displacements.push_back(detail::parse_vec3_list(field, "shape displacement"));

  for (const auto& joint : j.at("skeleton").at("joints")) {
    Joint out;
    out.name = joint.at("name").get<std::string>();
    out.parent = joint.at("parent").get<int>();
    const auto& off = joint.at("offset");
    out.offset = Vec3(off[0].get<double>(), off[1].get<double>(), off[2].get<double>());
    body.skeleton.joints.push_back(std::move(out));
  }

  for (const auto& entry : j.at("skin_weights")) {
    std::vector<std::pair<int, double>> inf;
    for (const auto& pair : entry) inf.emplace_back(pair[0].get<int>(), pair[1].get<double>());
    body.skin_weights.vertex_weights.push_back(normalize_influences(std::move(inf)));
  }

  body.validate();
  return body;
}

// Garment asset: mesh fields + class_label/source_kind/texture (+ optional
// layer). Weights and blend shapes are not stored; they are derived from the
// body by the transfer ops.
inline void save_garment(const fs::path& path, const ClothingAsset& asset,
                         const std::string& texture_rel_path) {
  json j = detail::mesh_fields(asset.mesh);
  j["class_label"] = garment_class_name(asset.class_label);
  j["source_kind"] = source_kind_name(asset.source_kind);
  j["texture"] = texture_rel_path;
  j["layer"] = asset.layer;
  save_json_file(path, j);
}

inline ClothingAsset load_garment(const fs::path& path) {
  json j = load_json_file(path);
  ClothingAsset asset;
  asset.name = path.stem().string();
  asset.mesh = detail::parse_mesh_fields(j, "garment asset " + path.string());
  asset.class_label = garment_class_from_name(j.at("class_label").get<std::string>());
  asset.source_kind = source_kind_from_name(j.at("source_kind").get<std::string>());
  asset.layer = j.value("layer", 1.0);
  fs::path tex = path.parent_path() / j.at("texture").get<std::string>();
  if (!fs::exists(tex)) throw AssetError("garment texture missing: " + tex.string());
  asset.base_texture = load_png_rgb8(tex.string());
  return asset;
}

inline void save_clip(const fs::path& path, const AnimationClip& clip) {
  json frames = json::array();
  for (const Keyframe& k : clip.keyframes) {
    json rot = json::array();
    for (const Quat& q : k.rotations) rot.push_back({q.w(), q.x(), q.y(), q.z()});
    frames.push_back({{"time", k.time},
                      {"root_translation",
                       {k.root_translation.x(), k.root_translation.y(), k.root_translation.z()}},
                      {"rotations", std::move(rot)}});
  }
  save_json_file(path, json{{"keyframes", std::move(frames)}});
}

inline AnimationClip load_clip(const fs::path& path) {
  json j = load_json_file(path);
  AnimationClip clip;
  for (const auto& frame : j.at("keyframes")) {
    Keyframe k;
    k.time = frame.at("time").get<double>();
    const auto& tr = frame.at("root_translation");
    k.root_translation = Vec3(tr[0].get<double>(), tr[1].get<double>(), tr[2].get<double>());
    for (const auto& q : frame.at("rotations")) {
      Quat rot(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
      k.rotations.push_back(rot.normalized());
    }
    clip.keyframes.push_back(std::move(k));
  }
  if (clip.keyframes.empty()) throw AssetError("animation clip has no keyframes: " + path.string());
  return clip;
}

// Plain mesh file (room geometry); body-asset geometry fields plus an
// optional texture reference.
struct StaticMesh {
  TemplateMesh mesh;
  Image8 texture;  // empty -> untextured, renderer uses flat gray
};

inline StaticMesh load_static_mesh(const fs::path& path) {
  json j = load_json_file(path);
  StaticMesh out;
  out.mesh = detail::parse_mesh_fields(j, "mesh " + path.string());
  if (j.contains("texture")) {
    fs::path tex = path.parent_path() / j.at("texture").get<std::string>();
    if (!fs::exists(tex)) throw AssetError("mesh texture missing: " + tex.string());
    out.texture = load_png_rgb8(tex.string());
  }
  return out;
}

inline void save_static_mesh(const fs::path& path, const TemplateMesh& mesh,
                             const std::string& texture_rel_path = "") {
  json j = detail::mesh_fields(mesh);
  if (!texture_rel_path.empty()) j["texture"] = texture_rel_path;
  save_json_file(path, j);
}

// Registry: a directory of garment JSON files. index.json lists files per
// class; without it the directory is scanned and classes read from the
// assets themselves.
struct GarmentRegistry {
  std::map<GarmentClass, std::vector<ClothingAsset>> per_class;

  const std::vector<ClothingAsset>& assets(GarmentClass g) const {
    auto it = per_class.find(g);
    if (it == per_class.end() || it->second.empty())
      throw ConfigError("garment registry: no assets for class " + garment_class_name(g));
    return it->second;
  }

  void require_all_classes() const {
    for (int g = 0; g < kGarmentClassCount; ++g) assets(static_cast<GarmentClass>(g));
  }
};

inline GarmentRegistry load_registry(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw AssetError("garment registry is not a directory: " + dir.string());
  GarmentRegistry reg;
  fs::path index = dir / "index.json";
  std::vector<fs::path> files;
  if (fs::exists(index)) {
    json j = load_json_file(index);
    for (const auto& [cls, list] : j.at("classes").items()) {
      (void)garment_class_from_name(cls);  // validate key
      for (const auto& rel : list) files.push_back(dir / rel.get<std::string>());
    }
  } else {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  }
  for (const auto& f : files) {
    ClothingAsset asset = load_garment(f);
    reg.per_class[asset.class_label].push_back(std::move(asset));
  }
  return reg;
}

// Derive rig binding + palette variants for one garment. Variant recolor
// seeds hash the asset name so regenerating a dataset never depends on load
// order.
inline void bind_garment(ClothingAsset& asset, const ParametricBody& body,
                         const PaletteSpec& palette) {
  asset.weights = transfer_weights(asset.mesh, body.mesh, body.skin_weights);
  asset.shape_basis = transfer_blendshapes(asset.mesh, body.mesh, body.shape_basis);
  asset.palette_variants.clear();
  auto hues = palette.target_hues();
  for (std::size_t i = 0; i < hues.size(); ++i)
    asset.palette_variants.push_back(
        recolor_texture(asset.base_texture, hues[i], name_hash(asset.name) + i, palette));
}

}  // namespace medsynth
