#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "medsynth/assets.hpp"
#include "medsynth/body_model.hpp"
#include "medsynth/rng.hpp"

namespace medsynth {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }

enum class Mode { DR, SDR, MR, Real };

inline std::string mode_name(Mode m) {
  switch (m) {
    case Mode::DR: return "DR";
    case Mode::SDR: return "SDR";
    case Mode::MR: return "MR";
    default: return "REAL";
  }
}

inline Mode mode_from_name(const std::string& s) {
  if (s == "DR") return Mode::DR;
  if (s == "SDR") return Mode::SDR;
  if (s == "MR") return Mode::MR;
  if (s == "REAL") return Mode::Real;
  throw ConfigError("unknown mode: " + s);
}

// Pinhole camera: u = cx + fx*x/z, v = cy + fy*y/z in camera space
// (x right, y down, z forward). World frame is z-up.
struct CameraModel {
  double fx = 960.0, fy = 960.0;
  double cx = 448.0, cy = 448.0;
  int width = 896, height = 896;
  Mat4 world_to_camera = Mat4::Identity();

  void validate() const {
    if (fx <= 0.0 || fy <= 0.0) throw ConfigError("camera: fx and fy must be positive");
    if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height)
      throw ConfigError("camera: principal point outside the image");
  }

  Vec3 to_camera(const Vec3& p) const {
    return (world_to_camera * p.homogeneous()).head<3>();
  }
};

// Proper (det +1) world-to-camera rotation; valid because the world is z-up.
inline Mat4 look_at(const Vec3& eye, const Vec3& target) {
  Vec3 forward = target - eye;
  double len = forward.norm();
  if (len < 1e-12) throw ConfigError("look_at: eye equals target");
  forward /= len;
  Vec3 up = Vec3::UnitZ();
  if (std::fabs(forward.dot(up)) > 0.999) up = Vec3::UnitY();
  Vec3 right = forward.cross(up).normalized();
  Vec3 down = forward.cross(right).normalized();
  Mat4 m = Mat4::Identity();
  m.block<1, 3>(0, 0) = right.transpose();
  m.block<1, 3>(1, 0) = down.transpose();
  m.block<1, 3>(2, 0) = forward.transpose();
  m.block<3, 1>(0, 3) = m.block<3, 3>(0, 0) * (-eye);
  return m;
}

struct Light {
  enum class Kind { Directional, Point };
  Kind kind = Kind::Directional;
  Vec3 vec = -Vec3::UnitZ();  // travel direction (directional) or position (point)
  Vec3 color = Vec3::Ones();  // linear RGB in [0,1]
  double intensity = 1.0;
};

// Blackbody-ish color temperature to linear RGB (Tanner Helland fit).
inline Vec3 color_temperature_rgb(double kelvin) {
  double t = std::clamp(kelvin, 1000.0, 40000.0) / 100.0;
  double r, g, b;
  if (t <= 66.0) {
    r = 255.0;
    g = std::clamp(99.4708025861 * std::log(t) - 161.1195681661, 0.0, 255.0);
    b = t <= 19.0 ? 0.0 : std::clamp(138.5177312231 * std::log(t - 10.0) - 305.0447927307, 0.0, 255.0);
  } else {
    r = std::clamp(329.698727446 * std::pow(t - 60.0, -0.1332047592), 0.0, 255.0);
    g = std::clamp(288.1221695283 * std::pow(t - 60.0, -0.0755148492), 0.0, 255.0);
    b = 255.0;
  }
  return Vec3(r, g, b) / 255.0;
}

struct DistractorInstance {
  enum class Kind { Box = 0, Sphere = 1, Cylinder = 2 };
  Kind kind = Kind::Box;
  Vec3 position = Vec3::Zero();
  Quat rotation = Quat::Identity();
  Vec3 scale = Vec3::Ones();
  int texture_index = -1;  // -1 -> procedural solid color
  Vec3 solid_color = Vec3::Ones();
};

struct OutfitPick {
  int asset_index = 0;
  int palette_variant = 0;
};

struct CharacterSpec {
  std::vector<double> shape_coeffs;
  int texture_index = 0;
  std::string gender_tag;
};

struct EnvironmentSpec {
  int background_index = -1;  // DR backdrop image; -1 when a room is used
  Vec3 character_position = Vec3::Zero();
  double character_yaw = 0.0;  // radians about +z
};

// One fully resolved frame; a pure function of (config, frame_index, seed).
struct FrameSpec {
  std::uint64_t seed = 0;
  int frame_index = 0;
  Mode mode = Mode::DR;
  CharacterSpec character;
  std::array<OutfitPick, kGarmentClassCount> outfit{};
  Pose pose;
  double pose_time = 0.0;
  CameraModel camera;
  std::vector<Light> lights;
  EnvironmentSpec environment;
  std::vector<DistractorInstance> distractors;

  Affine3 character_transform() const {
    return Eigen::Translation3d(environment.character_position) *
           Eigen::AngleAxisd(environment.character_yaw, Vec3::UnitZ());
  }
};

struct DistractorSpec {
  int count_min = 0;
  int count_max = 8;
  std::vector<DistractorInstance::Kind> kinds = {DistractorInstance::Kind::Box,
                                                 DistractorInstance::Kind::Sphere,
                                                 DistractorInstance::Kind::Cylinder};
  double scale_min = 0.08;
  double scale_max = 0.45;
  double region_radius = 2.2;
  double height_min = 0.1;
  double height_max = 2.2;
  std::vector<std::string> textures;
};

struct RoomScene {
  std::vector<std::string> mesh_files;
  std::vector<Vec2> placement_region;  // convex polygon on the floor (z = 0)
  std::vector<Vec3> ceiling_lights;
  Vec3 bounds_min = Vec3::Zero();
  Vec3 bounds_max = Vec3::Zero();
};

struct CameraRanges {
  double fx = 960.0, fy = 960.0, cx = 448.0, cy = 448.0;
  int width = 896, height = 896;
  double radius_min = 2.2, radius_max = 4.0;
  double height_min = 0.9, height_max = 2.1;
  double lookat_jitter_deg = 2.0;
  double target_height = 1.0;
};

struct LightRanges {
  int count_min = 1, count_max = 3;
  double intensity_min = 0.6, intensity_max = 1.2;
  double color_temp_min = 3000.0, color_temp_max = 6500.0;
};

struct RenderSettings {
  double ambient = 0.35;
  double near_plane = 0.05;
  double garment_offset_mm = 2.0;
  double min_visibility = 0.05;
  std::array<std::uint8_t, 3> backdrop_color = {96, 96, 96};
};

struct RandomizationConfig {
  Mode mode = Mode::DR;
  fs::path base_dir;
  fs::path body_asset;
  std::vector<std::vector<double>> shape_table;  // optional; N x num_coeffs
  int shape_coeff_count = 10;
  std::vector<std::string> human_textures;
  std::vector<std::string> human_texture_genders;  // optional, parallel
  fs::path garment_registry_dir;
  std::array<std::vector<std::string>, kGarmentClassCount> garment_files;
  std::vector<std::string> backgrounds;  // DR only
  DistractorSpec distractors;
  RoomScene room;  // SDR only
  CameraRanges camera;
  LightRanges lights;
  std::vector<std::string> animation_clip_files;
  std::vector<AnimationClip> clips;
  std::optional<int> frames_per_character;
  PaletteSpec palette;
  RenderSettings render;

  int palette_variant_count() const { return 3; }

  int effective_frames_per_character() const {
    if (frames_per_character) return std::max(1, *frames_per_character);
    return clips.empty() ? 1 : clips.front().interval_count();
  }

  void validate() const {
    camera_model_template().validate();
    palette.validate();
    if (clips.empty()) throw ConfigError("animation_clips pool is empty");
    if (human_textures.empty()) throw ConfigError("human_textures pool is empty");
    for (int g = 0; g < kGarmentClassCount; ++g)
      if (garment_files[g].empty())
        throw ConfigError("garment registry has no assets for class " +
                          garment_class_name(static_cast<GarmentClass>(g)));
    if (mode == Mode::DR) {
      if (backgrounds.empty()) throw ConfigError("backgrounds pool is empty");
    } else if (mode == Mode::SDR) {
      if (room.mesh_files.empty()) throw ConfigError("room_scene.meshes pool is empty");
      if (room.placement_region.size() < 3)
        throw ConfigError("room_scene.placement_region polygon is empty");
      if (room.ceiling_lights.empty()) throw ConfigError("room_scene.ceiling_lights pool is empty");
    }
  }

  CameraModel camera_model_template() const {
    CameraModel cam;
    cam.fx = camera.fx;
    cam.fy = camera.fy;
    cam.cx = camera.cx;
    cam.cy = camera.cy;
    cam.width = camera.width;
    cam.height = camera.height;
    return cam;
  }
};

namespace detail {

inline double polygon_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

inline bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

// Area-weighted uniform sample via fan triangulation (region is convex).
inline Vec2 sample_in_polygon(const std::vector<Vec2>& poly, Rng& rng) {
  std::vector<double> areas;
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    double a = std::fabs(0.5 * ((poly[i].x() - poly[0].x()) * (poly[i + 1].y() - poly[0].y()) -
                                (poly[i + 1].x() - poly[0].x()) * (poly[i].y() - poly[0].y())));
    areas.push_back(a);
    total += a;
  }
  if (total <= 0.0) throw ConfigError("placement region polygon has zero area");
  double pick = rng.uniform(0.0, total);
  std::size_t tri = 0;
  while (tri + 1 < areas.size() && pick > areas[tri]) {
    pick -= areas[tri];
    ++tri;
  }
  const Vec2& a = poly[0];
  const Vec2& b = poly[tri + 1];
  const Vec2& c = poly[tri + 2];
  double r1 = std::sqrt(rng.uniform());
  double r2 = rng.uniform();
  return (1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c;
}

inline Quat random_rotation(Rng& rng) {
  // Shoemake's uniform quaternion from three uniforms
  double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
  double s1 = std::sqrt(1.0 - u1), s2 = std::sqrt(u1);
  return Quat(s2 * std::cos(2.0 * kPi * u3), s1 * std::sin(2.0 * kPi * u2),
              s1 * std::cos(2.0 * kPi * u2), s2 * std::sin(2.0 * kPi * u3))
      .normalized();
}

inline CameraModel sample_camera(const RandomizationConfig& config, const Vec3& char_pos, Rng& rng,
                                 const Vec3* clamp_min, const Vec3* clamp_max) {
  const CameraRanges& cr = config.camera;
  double radius = rng.uniform(cr.radius_min, cr.radius_max);
  double azimuth = rng.uniform(0.0, 2.0 * kPi);
  double height = rng.uniform(cr.height_min, cr.height_max);
  Vec3 eye = char_pos + Vec3(radius * std::cos(azimuth), radius * std::sin(azimuth), height);
  if (clamp_min && clamp_max) {
    for (int i = 0; i < 3; ++i)
      eye[i] = std::clamp(eye[i], (*clamp_min)[i], (*clamp_max)[i]);
  }
  Vec3 target = char_pos + Vec3(0, 0, cr.target_height);
  double jyaw = deg_to_rad(rng.uniform(-cr.lookat_jitter_deg, cr.lookat_jitter_deg));
  double jpitch = deg_to_rad(rng.uniform(-cr.lookat_jitter_deg, cr.lookat_jitter_deg));
  Vec3 f = target - eye;
  double dist = f.norm();
  f /= dist;
  Vec3 right = f.cross(Vec3::UnitZ());
  if (right.norm() < 1e-9) right = Vec3::UnitX();
  right.normalize();
  Vec3 jittered = Eigen::AngleAxisd(jyaw, Vec3::UnitZ()) * (Eigen::AngleAxisd(jpitch, right) * f);
  CameraModel cam = config.camera_model_template();
  cam.world_to_camera = look_at(eye, eye + jittered * dist);
  return cam;
}

inline std::vector<Light> sample_dr_lights(const LightRanges& lr, Rng& rng) {
  int count = static_cast<int>(rng.uniform_int(lr.count_min, lr.count_max));
  std::vector<Light> lights;
  for (int i = 0; i < count; ++i) {
    double azimuth = rng.uniform(0.0, 2.0 * kPi);
    double elevation = rng.uniform(deg_to_rad(15.0), deg_to_rad(75.0));
    Light l;
    l.kind = Light::Kind::Directional;
    l.vec = -Vec3(std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth),
                  std::sin(elevation));  // travelling downward
    l.intensity = rng.uniform(lr.intensity_min, lr.intensity_max);
    l.color = color_temperature_rgb(rng.uniform(lr.color_temp_min, lr.color_temp_max));
    lights.push_back(l);
  }
  return lights;
}

inline std::vector<double> sample_shape_coeffs(const RandomizationConfig& config,
                                               std::size_t character_index, Rng& rng) {
  if (!config.shape_table.empty()) {
    const auto& row = config.shape_table[character_index % config.shape_table.size()];
    return row;
  }
  std::vector<double> coeffs(config.shape_coeff_count);
  for (double& c : coeffs) c = rng.clamped_normal(1.0, 3.0);
  return coeffs;
}

}  // namespace detail

// seed tags keep the per-character and per-frame streams independent
inline constexpr std::uint64_t kCharacterStreamTag = 1;
inline constexpr std::uint64_t kFrameStreamTag = 2;

// DR blueprint: iterate body shapes, one texture + outfit per character,
// play the animation across the character's frames; environment, camera,
// lights and distractors re-randomize every frame.
inline FrameSpec compose_dr(const RandomizationConfig& config, int frame_index,
                            std::uint64_t master_seed) {
  if (config.mode != Mode::DR) throw ConfigError("compose_dr: config mode is not DR");
  config.validate();

  int fpc = config.effective_frames_per_character();
  std::size_t character_index = static_cast<std::size_t>(frame_index) / fpc;
  int frame_in_character = frame_index % fpc;

  FrameSpec frame;
  frame.seed = stream_seed(master_seed, static_cast<std::uint64_t>(frame_index));
  frame.frame_index = frame_index;
  frame.mode = Mode::DR;

  Rng char_rng(stream_seed(master_seed, character_index, kCharacterStreamTag));
  frame.character.shape_coeffs = detail::sample_shape_coeffs(config, character_index, char_rng);
  frame.character.texture_index = static_cast<int>(char_rng.index(config.human_textures.size()));
  if (!config.human_texture_genders.empty())
    frame.character.gender_tag = config.human_texture_genders[frame.character.texture_index %
                                                              config.human_texture_genders.size()];
  for (int g = 0; g < kGarmentClassCount; ++g) {
    frame.outfit[g].asset_index = static_cast<int>(char_rng.index(config.garment_files[g].size()));
    frame.outfit[g].palette_variant =
        static_cast<int>(char_rng.index(config.palette_variant_count()));
  }
  int clip_index = static_cast<int>(char_rng.index(config.clips.size()));
  frame.environment.character_yaw = char_rng.uniform(0.0, 2.0 * kPi);
  frame.environment.character_position = Vec3::Zero();

  frame.pose_time = fpc > 1 ? static_cast<double>(frame_in_character) / (fpc - 1) : 0.0;
  frame.pose = sample_animation(config.clips[clip_index], frame.pose_time);

  Rng frame_rng(stream_seed(master_seed, static_cast<std::uint64_t>(frame_index), kFrameStreamTag));
  frame.environment.background_index = static_cast<int>(frame_rng.index(config.backgrounds.size()));
  frame.camera = detail::sample_camera(config, frame.environment.character_position, frame_rng,
                                       nullptr, nullptr);
  frame.lights = detail::sample_dr_lights(config.lights, frame_rng);

  const DistractorSpec& ds = config.distractors;
  int dcount = static_cast<int>(frame_rng.uniform_int(ds.count_min, ds.count_max));
  for (int i = 0; i < dcount; ++i) {
    DistractorInstance d;
    d.kind = ds.kinds[frame_rng.index(ds.kinds.size())];
    double ang = frame_rng.uniform(0.0, 2.0 * kPi);
    double rad = ds.region_radius * std::sqrt(frame_rng.uniform());
    d.position = Vec3(rad * std::cos(ang), rad * std::sin(ang),
                      frame_rng.uniform(ds.height_min, ds.height_max));
    d.rotation = detail::random_rotation(frame_rng);
    d.scale = Vec3(frame_rng.uniform(ds.scale_min, ds.scale_max),
                   frame_rng.uniform(ds.scale_min, ds.scale_max),
                   frame_rng.uniform(ds.scale_min, ds.scale_max));
    if (!ds.textures.empty())
      d.texture_index = static_cast<int>(frame_rng.index(ds.textures.size()));
    else
      d.solid_color = Vec3(frame_rng.uniform(0.1, 1.0), frame_rng.uniform(0.1, 1.0),
                           frame_rng.uniform(0.1, 1.0));
    frame.distractors.push_back(d);
  }
  return frame;
}

// SDR pipeline: fixed body shape, fresh outfit/placement/pose every frame,
// ceiling-anchored lights, camera inside the room aimed at the character.
inline FrameSpec compose_sdr(const RandomizationConfig& config, int frame_index,
                             std::uint64_t master_seed) {
  if (config.mode != Mode::SDR) throw ConfigError("compose_sdr: config mode is not SDR");
  config.validate();

  FrameSpec frame;
  frame.seed = stream_seed(master_seed, static_cast<std::uint64_t>(frame_index));
  frame.frame_index = frame_index;
  frame.mode = Mode::SDR;
  frame.character.shape_coeffs.assign(config.shape_coeff_count, 0.0);

  Rng rng(stream_seed(master_seed, static_cast<std::uint64_t>(frame_index), kFrameStreamTag));
  frame.character.texture_index = static_cast<int>(rng.index(config.human_textures.size()));
  if (!config.human_texture_genders.empty())
    frame.character.gender_tag = config.human_texture_genders[frame.character.texture_index %
                                                              config.human_texture_genders.size()];
  for (int g = 0; g < kGarmentClassCount; ++g) {
    frame.outfit[g].asset_index = static_cast<int>(rng.index(config.garment_files[g].size()));
    frame.outfit[g].palette_variant = static_cast<int>(rng.index(config.palette_variant_count()));
  }
  int clip_index = static_cast<int>(rng.index(config.clips.size()));
  frame.pose_time = rng.uniform();
  frame.pose = sample_animation(config.clips[clip_index], frame.pose_time);

  Vec2 spot = detail::sample_in_polygon(config.room.placement_region, rng);
  frame.environment.character_position = Vec3(spot.x(), spot.y(), 0.0);
  frame.environment.character_yaw = rng.uniform(0.0, 2.0 * kPi);
  frame.environment.background_index = -1;

  Vec3 margin(0.15, 0.15, 0.15);
  Vec3 lo = config.room.bounds_min + margin;
  Vec3 hi = config.room.bounds_max - margin;
  frame.camera =
      detail::sample_camera(config, frame.environment.character_position, rng, &lo, &hi);

  const LightRanges& lr = config.lights;
  int want = static_cast<int>(rng.uniform_int(lr.count_min, lr.count_max));
  int count = std::min<int>(want, static_cast<int>(config.room.ceiling_lights.size()));
  std::vector<std::size_t> order(config.room.ceiling_lights.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  for (int i = 0; i < count; ++i) {
    Light l;
    l.kind = Light::Kind::Point;
    l.vec = config.room.ceiling_lights[order[i]];
    l.intensity = rng.uniform(lr.intensity_min, lr.intensity_max);
    l.color = color_temperature_rgb(rng.uniform(lr.color_temp_min, lr.color_temp_max));
    frame.lights.push_back(l);
  }
  return frame;
}

inline FrameSpec compose_frame(const RandomizationConfig& config, int frame_index,
                               std::uint64_t master_seed) {
  return config.mode == Mode::DR ? compose_dr(config, frame_index, master_seed)
                                 : compose_sdr(config, frame_index, master_seed);
}

inline std::vector<FrameSpec> plan_dataset(const RandomizationConfig& config, int count,
                                           std::uint64_t master_seed) {
  if (count < 1) throw ValidationError("plan_dataset: count must be >= 1");
  std::vector<FrameSpec> plan;
  plan.reserve(count);
  for (int i = 0; i < count; ++i) plan.push_back(compose_frame(config, i, master_seed));
  return plan;
}

}  // namespace medsynth
