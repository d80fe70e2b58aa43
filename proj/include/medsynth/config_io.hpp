#pragma once

#include "medsynth/assets.hpp"
#include "medsynth/scene.hpp"

namespace medsynth {

namespace detail {

inline void parse_range(const json& j, const char* key, double& lo, double& hi) {
  if (!j.contains(key)) return;
  const auto& r = j.at(key);
  if (!r.is_array() || r.size() != 2) throw ConfigError(std::string(key) + ": expected [lo, hi]");
  lo = r[0].get<double>();
  hi = r[1].get<double>();
  if (lo > hi) throw ConfigError(std::string(key) + ": lo > hi");
}

inline void parse_int_range(const json& j, const char* key, int& lo, int& hi) {
  double a = lo, b = hi;
  parse_range(j, key, a, b);
  lo = static_cast<int>(a);
  hi = static_cast<int>(b);
}

// Garment file lists per class, in index order (or sorted scan order); the
// composer samples indices into these lists and the asset store loads them
// in the same order.
inline std::array<std::vector<std::string>, kGarmentClassCount> registry_file_lists(
    const fs::path& dir) {
  std::array<std::vector<std::string>, kGarmentClassCount> lists;
  if (!fs::is_directory(dir))
    throw ConfigError("garment_registry is not a directory: " + dir.string());
  std::vector<fs::path> files;
  fs::path index = dir / "index.json";
  if (fs::exists(index)) {
    json j = load_json_file(index);
    for (const auto& [cls, list] : j.at("classes").items())
      for (const auto& rel : list) files.push_back(dir / rel.get<std::string>());
  } else {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  }
  for (const auto& f : files) {
    json j = load_json_file(f);
    GarmentClass g = garment_class_from_name(j.at("class_label").get<std::string>());
    lists[static_cast<int>(g)].push_back(f.string());
  }
  return lists;
}

}  // namespace detail

inline PaletteSpec parse_palette(const json& j) {
  PaletteSpec p;
  p.blue_hue = j.value("blue_hue", p.blue_hue);
  p.green_hue = j.value("green_hue", p.green_hue);
  p.light_pink_hue = j.value("light_pink_hue", p.light_pink_hue);
  p.hue_jitter = j.value("hue_jitter", p.hue_jitter);
  detail::parse_range(j, "saturation_scale", p.sat_scale_min, p.sat_scale_max);
  detail::parse_range(j, "value_scale", p.value_scale_min, p.value_scale_max);
  p.min_saturation = j.value("min_saturation", p.min_saturation);
  p.validate();
  return p;
}

inline RandomizationConfig load_config(const fs::path& path) {
  json j = load_json_file(path);
  RandomizationConfig cfg;
  cfg.base_dir = fs::absolute(path).parent_path();
  auto resolve = [&](const std::string& rel) { return (cfg.base_dir / rel).string(); };

  cfg.mode = mode_from_name(j.at("mode").get<std::string>());
  cfg.body_asset = resolve(j.at("body_asset").get<std::string>());
  if (!fs::exists(cfg.body_asset)) throw ConfigError("body_asset missing: " + cfg.body_asset.string());

  if (j.contains("shape_table")) {
    const auto& st = j.at("shape_table");
    json rows = st.is_string() ? load_json_file(resolve(st.get<std::string>())) : st;
    for (const auto& row : rows) {
      std::vector<double> r;
      for (const auto& v : row) r.push_back(v.get<double>());
      cfg.shape_table.push_back(std::move(r));
    }
    if (!cfg.shape_table.empty()) cfg.shape_coeff_count = static_cast<int>(cfg.shape_table[0].size());
    for (const auto& row : cfg.shape_table)
      if (static_cast<int>(row.size()) != cfg.shape_coeff_count)
        throw ConfigError("shape_table rows must all have the same length");
  }
  cfg.shape_coeff_count = j.value("shape_coeff_count", cfg.shape_coeff_count);

  for (const auto& t : j.at("human_textures")) cfg.human_textures.push_back(resolve(t.get<std::string>()));
  if (j.contains("human_texture_genders"))
    for (const auto& g : j.at("human_texture_genders"))
      cfg.human_texture_genders.push_back(g.get<std::string>());

  cfg.garment_registry_dir = resolve(j.at("garment_registry").get<std::string>());
  cfg.garment_files = detail::registry_file_lists(cfg.garment_registry_dir);

  if (j.contains("backgrounds"))
    for (const auto& b : j.at("backgrounds")) cfg.backgrounds.push_back(resolve(b.get<std::string>()));

  if (j.contains("distractors")) {
    const auto& d = j.at("distractors");
    detail::parse_int_range(d, "count", cfg.distractors.count_min, cfg.distractors.count_max);
    detail::parse_range(d, "scale", cfg.distractors.scale_min, cfg.distractors.scale_max);
    detail::parse_range(d, "height", cfg.distractors.height_min, cfg.distractors.height_max);
    cfg.distractors.region_radius = d.value("region_radius", cfg.distractors.region_radius);
    if (d.contains("kinds")) {
      cfg.distractors.kinds.clear();
      for (const auto& k : d.at("kinds")) {
        std::string name = k.get<std::string>();
        if (name == "box") cfg.distractors.kinds.push_back(DistractorInstance::Kind::Box);
        else if (name == "sphere") cfg.distractors.kinds.push_back(DistractorInstance::Kind::Sphere);
        else if (name == "cylinder") cfg.distractors.kinds.push_back(DistractorInstance::Kind::Cylinder);
        else throw ConfigError("unknown distractor kind: " + name);
      }
    }
    if (d.contains("textures"))
      for (const auto& t : d.at("textures")) cfg.distractors.textures.push_back(resolve(t.get<std::string>()));
  }

  if (j.contains("room_scene")) {
    const auto& r = j.at("room_scene");
    for (const auto& m : r.at("meshes")) cfg.room.mesh_files.push_back(resolve(m.get<std::string>()));
    for (const auto& p : r.at("placement_region"))
      cfg.room.placement_region.emplace_back(p[0].get<double>(), p[1].get<double>());
    for (const auto& p : r.at("ceiling_lights"))
      cfg.room.ceiling_lights.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    Vec3 lo = Vec3::Constant(1e30), hi = Vec3::Constant(-1e30);
    for (const auto& mf : cfg.room.mesh_files) {
      StaticMesh sm = load_static_mesh(mf);
      for (const Vec3& v : sm.mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
    }
    cfg.room.bounds_min = lo;
    cfg.room.bounds_max = hi;
  }

  if (j.contains("camera")) {
    const auto& c = j.at("camera");
    cfg.camera.fx = c.value("fx", cfg.camera.fx);
    cfg.camera.fy = c.value("fy", cfg.camera.fy);
    cfg.camera.cx = c.value("cx", cfg.camera.cx);
    cfg.camera.cy = c.value("cy", cfg.camera.cy);
    cfg.camera.width = c.value("width", cfg.camera.width);
    cfg.camera.height = c.value("height", cfg.camera.height);
    detail::parse_range(c, "radius", cfg.camera.radius_min, cfg.camera.radius_max);
    detail::parse_range(c, "height_range", cfg.camera.height_min, cfg.camera.height_max);
    cfg.camera.lookat_jitter_deg = c.value("lookat_jitter_deg", cfg.camera.lookat_jitter_deg);
    cfg.camera.target_height = c.value("target_height", cfg.camera.target_height);
  }

  if (j.contains("lights")) {
    const auto& l = j.at("lights");
    detail::parse_int_range(l, "count", cfg.lights.count_min, cfg.lights.count_max);
    detail::parse_range(l, "intensity", cfg.lights.intensity_min, cfg.lights.intensity_max);
    detail::parse_range(l, "color_temp", cfg.lights.color_temp_min, cfg.lights.color_temp_max);
  }

  for (const auto& c : j.at("animation_clips")) {
    std::string file = resolve(c.get<std::string>());
    cfg.animation_clip_files.push_back(file);
    cfg.clips.push_back(load_clip(file));
  }

  if (j.contains("frames_per_character"))
    cfg.frames_per_character = j.at("frames_per_character").get<int>();

  if (j.contains("palette")) cfg.palette = parse_palette(j.at("palette"));

  if (j.contains("render")) {
    const auto& r = j.at("render");
    cfg.render.ambient = r.value("ambient", cfg.render.ambient);
    cfg.render.near_plane = r.value("near", cfg.render.near_plane);
    cfg.render.garment_offset_mm = r.value("garment_offset_mm", cfg.render.garment_offset_mm);
    cfg.render.min_visibility = r.value("min_visibility", cfg.render.min_visibility);
    if (r.contains("backdrop_color")) {
      const auto& b = r.at("backdrop_color");
      for (int i = 0; i < 3; ++i) cfg.render.backdrop_color[i] = b[i].get<std::uint8_t>();
    }
  }

  cfg.validate();
  return cfg;
}

// FrameSpec serialization; generation round-trips are checked byte-for-byte
// on this form.
inline json frame_spec_to_json(const FrameSpec& frame) {
  json j;
  j["seed"] = frame.seed;
  j["frame_index"] = frame.frame_index;
  j["mode"] = mode_name(frame.mode);
  j["character"] = {{"shape_coeffs", frame.character.shape_coeffs},
                    {"texture_index", frame.character.texture_index},
                    {"gender_tag", frame.character.gender_tag}};
  json outfit = json::array();
  for (int g = 0; g < kGarmentClassCount; ++g)
    outfit.push_back({{"class", garment_class_name(static_cast<GarmentClass>(g))},
                      {"asset_index", frame.outfit[g].asset_index},
                      {"palette_variant", frame.outfit[g].palette_variant}});
  j["outfit"] = std::move(outfit);
  j["pose_time"] = frame.pose_time;
  json rot = json::array();
  for (const Quat& q : frame.pose.rotations) rot.push_back({q.w(), q.x(), q.y(), q.z()});
  j["pose"] = {{"rotations", std::move(rot)},
               {"root_translation",
                {frame.pose.root_translation.x(), frame.pose.root_translation.y(),
                 frame.pose.root_translation.z()}}};
  json cam;
  cam["fx"] = frame.camera.fx;
  cam["fy"] = frame.camera.fy;
  cam["cx"] = frame.camera.cx;
  cam["cy"] = frame.camera.cy;
  cam["width"] = frame.camera.width;
  cam["height"] = frame.camera.height;
  json m = json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m.push_back(frame.camera.world_to_camera(r, c));
  cam["world_to_camera"] = std::move(m);
  j["camera"] = std::move(cam);
  json lights = json::array();
  for (const Light& l : frame.lights)
    lights.push_back({{"kind", l.kind == Light::Kind::Directional ? "directional" : "point"},
                      {"vec", {l.vec.x(), l.vec.y(), l.vec.z()}},
                      {"color", {l.color.x(), l.color.y(), l.color.z()}},
                      {"intensity", l.intensity}});
  j["lights"] = std::move(lights);
  j["environment"] = {{"background_index", frame.environment.background_index},
                      {"character_position",
                       {frame.environment.character_position.x(),
                        frame.environment.character_position.y(),
                        frame.environment.character_position.z()}},
                      {"character_yaw", frame.environment.character_yaw}};
  json ds = json::array();
  for (const DistractorInstance& d : frame.distractors)
    ds.push_back({{"kind", static_cast<int>(d.kind)},
                  {"position", {d.position.x(), d.position.y(), d.position.z()}},
                  {"rotation", {d.rotation.w(), d.rotation.x(), d.rotation.y(), d.rotation.z()}},
                  {"scale", {d.scale.x(), d.scale.y(), d.scale.z()}},
                  {"texture_index", d.texture_index},
                  {"solid_color", {d.solid_color.x(), d.solid_color.y(), d.solid_color.z()}}});
  j["distractors"] = std::move(ds);
  return j;
}

}  // namespace medsynth
