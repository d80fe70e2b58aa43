#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "medsynth/asset_store.hpp"
#include "medsynth/body_model.hpp"
#include "medsynth/mesh_primitives.hpp"
#include "medsynth/png_io.hpp"

namespace medsynth {

// Procedural desk-scale assets: a capsule-limb human with a hand-extended
// rig, tube garments fitted to it, seeded textures, a box room and a small
// animation clip. Used by the test suites and the demo-asset tool.

namespace fixtures {

inline TemplateMesh capsule_between(const Vec3& a, const Vec3& b, double radius, int rings = 5,
                                    int segments = 10) {
  Vec3 axis = b - a;
  double len = axis.norm();
  TemplateMesh m = make_capsule(radius, len, rings, segments);
  Quat rot = Quat::FromTwoVectors(Vec3::UnitZ(), axis.normalized());
  Affine3 xf = Eigen::Translation3d((a + b) / 2.0) * rot;
  return transformed(m, xf);
}

// Open tube around the z axis; angle_frac < 1 leaves it partially open
// (used for the mask patch).
inline TemplateMesh make_tube(const Vec2& center, double radius, double z0, double z1,
                              int segments = 16, int rings = 6, double angle_start = 0.0,
                              double angle_frac = 1.0) {
  TemplateMesh m;
  for (int r = 0; r <= rings; ++r) {
    double z = z0 + (z1 - z0) * r / rings;
    for (int s = 0; s <= segments; ++s) {
      double theta = angle_start + 2.0 * kPi * angle_frac * s / segments;
      m.vertices.emplace_back(center.x() + radius * std::cos(theta),
                              center.y() + radius * std::sin(theta), z);
      m.uvs.emplace_back(static_cast<double>(s) / segments, static_cast<double>(r) / rings);
    }
  }
  int stride = segments + 1;
  for (int r = 0; r < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      std::uint32_t a = r * stride + s, b = a + 1, c = a + stride, d = c + 1;
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({b, d, c});
    }
  }
  recompute_normals(m);
  return m;
}

inline TemplateMesh make_hemisphere(const Vec3& center, double radius, int rings = 4,
                                    int segments = 12) {
  TemplateMesh m;
  for (int r = 0; r <= rings; ++r) {
    double phi = 0.5 * kPi * r / rings;  // pole to equator
    for (int s = 0; s <= segments; ++s) {
      double theta = 2.0 * kPi * s / segments;
      m.vertices.emplace_back(center.x() + radius * std::sin(phi) * std::cos(theta),
                              center.y() + radius * std::sin(phi) * std::sin(theta),
                              center.z() + radius * std::cos(phi));
      m.uvs.emplace_back(static_cast<double>(s) / segments, static_cast<double>(r) / rings);
    }
  }
  int stride = segments + 1;
  for (int r = 0; r < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      std::uint32_t a = r * stride + s, b = a + 1, c = a + stride, d = c + 1;
      m.triangles.push_back({a, c, b});
      m.triangles.push_back({b, c, d});
    }
  }
  recompute_normals(m);
  return m;
}

struct BoneSegment {
  int joint = 0;
  Vec3 p0 = Vec3::Zero();
  Vec3 p1 = Vec3::Zero();
};

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab = b - a;
  double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

// Inverse-distance blend of the two nearest bones (the body's own weights;
// garments later inherit them through transfer_weights).
inline SkinWeights weights_from_bones(const TemplateMesh& mesh,
                                      const std::vector<BoneSegment>& bones) {
  SkinWeights w;
  w.vertex_weights.resize(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    int best = -1, second = -1;
    double d_best = 1e30, d_second = 1e30;
    for (std::size_t b = 0; b < bones.size(); ++b) {
      double d = point_segment_distance(mesh.vertices[v], bones[b].p0, bones[b].p1);
      if (d < d_best) {
        second = best;
        d_second = d_best;
        best = static_cast<int>(b);
        d_best = d;
      } else if (d < d_second) {
        second = static_cast<int>(b);
        d_second = d;
      }
    }
    std::vector<std::pair<int, double>> inf;
    if (second < 0 || d_best < 1e-9 || bones[best].joint == bones[second].joint) {
      inf.emplace_back(bones[best].joint, 1.0);
    } else {
      double w1 = 1.0 / (d_best + 1e-6), w2 = 1.0 / (d_second + 1e-6);
      // sharpen toward the nearest bone so limbs stay mostly rigid
      w1 = w1 * w1;
      w2 = w2 * w2;
      inf.emplace_back(bones[best].joint, w1 / (w1 + w2));
      inf.emplace_back(bones[second].joint, w2 / (w1 + w2));
    }
    w.vertex_weights[v] = normalize_influences(std::move(inf));
  }
  return w;
}

}  // namespace fixtures

// Capsule-limb human: 21 joints (fingers included), ~1.3k vertices, 10
// smooth shape blend shapes.
inline ParametricBody make_capsule_human() {
  ParametricBody body;
  auto add_joint = [&](const std::string& name, int parent, const Vec3& offset) {
    body.skeleton.joints.push_back({name, parent, offset});
    return static_cast<int>(body.skeleton.joints.size()) - 1;
  };

  int root = add_joint("root", -1, {0, 0, 0.95});
  int spine = add_joint("spine", root, {0, 0, 0.18});
  int chest = add_joint("chest", spine, {0, 0, 0.18});
  int neck = add_joint("neck", chest, {0, 0, 0.14});
  int head = add_joint("head", neck, {0, 0, 0.10});
  int l_shoulder = add_joint("l_shoulder", chest, {0.17, 0, 0.10});
  int l_elbow = add_joint("l_elbow", l_shoulder, {0.25, 0, 0});
  int l_wrist = add_joint("l_wrist", l_elbow, {0.23, 0, 0});
  int l_finger1 = add_joint("l_finger1", l_wrist, {0.08, 0, 0});
  int l_finger2 = add_joint("l_finger2", l_finger1, {0.06, 0, 0});
  int r_shoulder = add_joint("r_shoulder", chest, {-0.17, 0, 0.10});
  int r_elbow = add_joint("r_elbow", r_shoulder, {-0.25, 0, 0});
  int r_wrist = add_joint("r_wrist", r_elbow, {-0.23, 0, 0});
  int r_finger1 = add_joint("r_finger1", r_wrist, {-0.08, 0, 0});
  int r_finger2 = add_joint("r_finger2", r_finger1, {-0.06, 0, 0});
  int l_hip = add_joint("l_hip", root, {0.09, 0, -0.03});
  int l_knee = add_joint("l_knee", l_hip, {0, 0, -0.44});
  int l_ankle = add_joint("l_ankle", l_knee, {0, 0, -0.42});
  int r_hip = add_joint("r_hip", root, {-0.09, 0, -0.03});
  int r_knee = add_joint("r_knee", r_hip, {0, 0, -0.44});
  int r_ankle = add_joint("r_ankle", r_knee, {0, 0, -0.42});

  std::vector<Affine3> rest = rest_world_transforms(body.skeleton);
  auto at = [&](int j) { return Vec3(rest[j].translation()); };

  using fixtures::capsule_between;
  TemplateMesh& mesh = body.mesh;
  append_mesh(mesh, capsule_between(at(root) - Vec3(0, 0, 0.08), at(neck), 0.15, 6, 12));
  append_mesh(mesh, fixtures::make_hemisphere(at(head) - Vec3(0, 0, 0.02), 0.11, 5, 12));
  append_mesh(mesh, capsule_between(at(head) + Vec3(0, 0, 0.02), at(head) - Vec3(0, 0, 0.06), 0.10, 4, 10));
  append_mesh(mesh, capsule_between(at(l_shoulder), at(l_elbow), 0.055));
  append_mesh(mesh, capsule_between(at(l_elbow), at(l_wrist), 0.048));
  append_mesh(mesh, capsule_between(at(l_wrist), at(l_finger2) + Vec3(0.05, 0, 0), 0.042));
  append_mesh(mesh, capsule_between(at(r_shoulder), at(r_elbow), 0.055));
  append_mesh(mesh, capsule_between(at(r_elbow), at(r_wrist), 0.048));
  append_mesh(mesh, capsule_between(at(r_wrist), at(r_finger2) - Vec3(0.05, 0, 0), 0.042));
  append_mesh(mesh, capsule_between(at(l_hip), at(l_knee), 0.075));
  append_mesh(mesh, capsule_between(at(l_knee), at(l_ankle), 0.058));
  append_mesh(mesh, capsule_between(at(l_ankle), at(l_ankle) + Vec3(0, 0.13, -0.02), 0.05, 3, 8));
  append_mesh(mesh, capsule_between(at(r_hip), at(r_knee), 0.075));
  append_mesh(mesh, capsule_between(at(r_knee), at(r_ankle), 0.058));
  append_mesh(mesh, capsule_between(at(r_ankle), at(r_ankle) + Vec3(0, 0.13, -0.02), 0.05, 3, 8));
  recompute_normals(mesh);

  std::vector<fixtures::BoneSegment> bones;
  auto add_bone = [&](int j, const Vec3& a, const Vec3& b) { bones.push_back({j, a, b}); };
  add_bone(root, at(root) - Vec3(0, 0, 0.08), at(spine));
  add_bone(spine, at(spine), at(chest));
  add_bone(chest, at(chest), at(neck));
  add_bone(neck, at(neck), at(head));
  add_bone(head, at(head), at(head) + Vec3(0, 0, 0.12));
  add_bone(l_shoulder, at(l_shoulder), at(l_elbow));
  add_bone(l_elbow, at(l_elbow), at(l_wrist));
  add_bone(l_wrist, at(l_wrist), at(l_finger1));
  add_bone(l_finger1, at(l_finger1), at(l_finger2));
  add_bone(l_finger2, at(l_finger2), at(l_finger2) + Vec3(0.06, 0, 0));
  add_bone(r_shoulder, at(r_shoulder), at(r_elbow));
  add_bone(r_elbow, at(r_elbow), at(r_wrist));
  add_bone(r_wrist, at(r_wrist), at(r_finger1));
  add_bone(r_finger1, at(r_finger1), at(r_finger2));
  add_bone(r_finger2, at(r_finger2), at(r_finger2) - Vec3(0.06, 0, 0));
  add_bone(l_hip, at(l_hip), at(l_knee));
  add_bone(l_knee, at(l_knee), at(l_ankle));
  add_bone(l_ankle, at(l_ankle), at(l_ankle) + Vec3(0, 0.14, -0.02));
  add_bone(r_hip, at(r_hip), at(r_knee));
  add_bone(r_knee, at(r_knee), at(r_ankle));
  add_bone(r_ankle, at(r_ankle), at(r_ankle) + Vec3(0, 0.14, -0.02));
  body.skin_weights = fixtures::weights_from_bones(mesh, bones);

  // 10 smooth blend shapes: global size, height, width, belly, plus bends
  body.shape_basis.num_coeffs = 10;
  Vec3 center(0, 0, 0.95);
  auto field = [&](const std::function<Vec3(const Vec3&)>& f) {
    std::vector<Vec3> d(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) d[i] = f(mesh.vertices[i]);
    return d;
  };
  auto& disp = body.shape_basis.displacements;
  disp.push_back(field([&](const Vec3& v) { return Vec3(0.05 * (v - center)); }));
  disp.push_back(field([&](const Vec3& v) { return Vec3(0, 0, 0.10 * (v.z() - 0.95)); }));
  disp.push_back(field([&](const Vec3& v) { return Vec3(0.07 * v.x(), 0.05 * v.y(), 0); }));
  disp.push_back(field([&](const Vec3& v) {
    double g = std::exp(-std::pow((v.z() - 1.10) / 0.18, 2.0));
    return Vec3(0.04 * g * v.x(), 0.07 * g * (v.y() + 0.05), 0);
  }));
  for (int k = 0; k < 6; ++k) {
    double freq = 2.0 + k;
    double amp = 0.015;
    int axis = k % 3;
    disp.push_back(field([=](const Vec3& v) {
      Vec3 d = Vec3::Zero();
      d[axis] = amp * std::sin(freq * v.z() + 0.7 * k);
      return d;
    }));
  }
  body.validate();
  return body;
}

// Tube/cap garments fitted to the rest pose of make_capsule_human().
inline TemplateMesh make_garment_mesh(GarmentClass cls) {
  using fixtures::make_tube;
  TemplateMesh m;
  switch (cls) {
    case GarmentClass::Gown:
      m = make_tube({0, 0}, 0.21, 0.72, 1.44, 18, 8);
      break;
    case GarmentClass::Shirt:
      m = make_tube({0, 0}, 0.185, 1.00, 1.43, 16, 6);
      break;
    case GarmentClass::Pants: {
      m = make_tube({0.09, 0}, 0.105, 0.30, 0.92, 12, 6);
      append_mesh(m, make_tube({-0.09, 0}, 0.105, 0.30, 0.92, 12, 6));
      append_mesh(m, make_tube({0, 0}, 0.19, 0.92, 1.02, 14, 2));
      recompute_normals(m);
      break;
    }
    case GarmentClass::Hat:
      m = fixtures::make_hemisphere({0, 0, 1.555}, 0.125, 4, 12);
      break;
    case GarmentClass::Mask:
      // patch over the lower front half of the face
      m = make_tube({0.0, 0.005}, 0.115, 1.47, 1.56, 10, 3, 0.25 * kPi, 0.25);
      break;
    case GarmentClass::Glove: {
      Vec3 lw(0.65, 0, 1.41), lf(0.84, 0, 1.41);
      m = fixtures::capsule_between(lw, lf, 0.05, 4, 8);
      append_mesh(m, fixtures::capsule_between(Vec3(-0.65, 0, 1.41), Vec3(-0.84, 0, 1.41), 0.05, 4, 8));
      recompute_normals(m);
      break;
    }
  }
  return m;
}

// Seeded fabric-ish texture: soft value noise over a base color.
inline Image8 make_noise_texture(int size, std::uint64_t seed, const Vec3& base_rgb,
                                 double variation = 0.25) {
  Rng rng(mix64(seed));
  Image8 img(size, size, 3);
  constexpr int cell = 8;
  int grid = size / cell + 2;
  std::vector<double> noise(static_cast<std::size_t>(grid) * grid);
  for (double& n : noise) n = rng.uniform(-1.0, 1.0);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double gx = static_cast<double>(x) / cell, gy = static_cast<double>(y) / cell;
      int ix = static_cast<int>(gx), iy = static_cast<int>(gy);
      double fx = gx - ix, fy = gy - iy;
      auto n = [&](int a, int b) { return noise[static_cast<std::size_t>(b) * grid + a]; };
      double v = (1 - fx) * (1 - fy) * n(ix, iy) + fx * (1 - fy) * n(ix + 1, iy) +
                 (1 - fx) * fy * n(ix, iy + 1) + fx * fy * n(ix + 1, iy + 1);
      for (int c = 0; c < 3; ++c)
        img.at(x, y, c) = to_u8(255.0 * std::clamp(base_rgb[c] * (1.0 + variation * v), 0.0, 1.0));
    }
  }
  return img;
}

inline Image8 make_checker_texture(int size, int cells, const Vec3& a, const Vec3& b) {
  Image8 img(size, size, 3);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      bool odd = ((x * cells / size) + (y * cells / size)) % 2;
      const Vec3& c = odd ? b : a;
      img.set_rgb(x, y, to_u8(c.x() * 255), to_u8(c.y() * 255), to_u8(c.z() * 255));
    }
  return img;
}

// A grasping-motion-flavored clip: arms swing forward and back once.
inline AnimationClip make_demo_clip(const Skeleton& skeleton, int keyframe_count = 5) {
  AnimationClip clip;
  int n = skeleton.joint_count();
  auto joint_index = [&](const std::string& name) {
    for (int j = 0; j < n; ++j)
      if (skeleton.joints[j].name == name) return j;
    return -1;
  };
  int ls = joint_index("l_shoulder"), rs = joint_index("r_shoulder");
  int le = joint_index("l_elbow"), re = joint_index("r_elbow");
  int sp = joint_index("spine");

  for (int k = 0; k < keyframe_count; ++k) {
    double t = static_cast<double>(k) / (keyframe_count - 1);
    double swing = std::sin(t * kPi);  // 0 -> 1 -> 0
    Keyframe key;
    key.time = t;
    key.root_translation = Vec3(0.0, 0.08 * swing, 0.0);
    key.rotations.assign(n, Quat::Identity());
    if (ls >= 0) key.rotations[ls] = Quat(Eigen::AngleAxisd(-0.9 * swing, Vec3::UnitY()));
    if (rs >= 0) key.rotations[rs] = Quat(Eigen::AngleAxisd(0.9 * swing, Vec3::UnitY()));
    if (le >= 0) key.rotations[le] = Quat(Eigen::AngleAxisd(-0.5 * swing, Vec3::UnitY()));
    if (re >= 0) key.rotations[re] = Quat(Eigen::AngleAxisd(0.5 * swing, Vec3::UnitY()));
    if (sp >= 0) key.rotations[sp] = Quat(Eigen::AngleAxisd(0.12 * swing, Vec3::UnitX()));
    clip.keyframes.push_back(std::move(key));
  }
  return clip;
}

// Box intervention room, interior faces visible, floor at z = 0.
inline TemplateMesh make_room_mesh(double half_x = 3.0, double half_y = 3.0, double height = 3.0) {
  TemplateMesh m = make_box();
  Affine3 xf = Eigen::Translation3d(0, 0, height / 2.0) *
               Eigen::Scaling(2.0 * half_x, 2.0 * half_y, height);
  m = transformed(m, xf);
  recompute_normals(m);
  return m;
}

struct DemoAssetOptions {
  int image_size = 896;
  int human_texture_count = 4;
  int background_count = 4;
  int shape_table_rows = 12;
  std::uint64_t seed = 7;
};

// Writes a complete asset tree + DR and SDR configs; returns the config
// paths. Layout: body.json, garments/, textures/, backgrounds/, clips/,
// room/, shapes.json, config_dr.json, config_sdr.json.
struct DemoAssets {
  fs::path dr_config;
  fs::path sdr_config;
};

inline DemoAssets write_demo_assets(const fs::path& dir, const DemoAssetOptions& opt = {}) {
  fs::create_directories(dir / "garments");
  fs::create_directories(dir / "textures");
  fs::create_directories(dir / "backgrounds");
  fs::create_directories(dir / "clips");
  fs::create_directories(dir / "room");

  ParametricBody body = make_capsule_human();
  save_body(dir / "body.json", body);

  json index;
  index["classes"] = json::object();
  for (int g = 0; g < kGarmentClassCount; ++g) {
    GarmentClass cls = static_cast<GarmentClass>(g);
    std::string cls_name = garment_class_name(cls);
    Vec3 base = Vec3(0.75, 0.78, 0.80);
    Image8 tex = make_noise_texture(64, opt.seed + 100 + g, base, 0.2);
    std::string tex_name = cls_name + ".png";
    save_png((dir / "garments" / tex_name).string(), tex);

    ClothingAsset asset;
    asset.mesh = make_garment_mesh(cls);
    asset.class_label = cls;
    asset.source_kind = g % 2 == 0 ? SourceKind::Designed : SourceKind::Scanned;
    asset.layer = cls == GarmentClass::Gown ? 2.0 : 1.0;
    std::string file = cls_name + "_a.json";
    save_garment(dir / "garments" / file, asset, tex_name);
    index["classes"][cls_name] = json::array({file});
  }
  save_json_file(dir / "garments" / "index.json", index);

  json human_textures = json::array();
  json genders = json::array();
  for (int i = 0; i < opt.human_texture_count; ++i) {
    Vec3 skin(0.78 - 0.12 * (i % 3), 0.62 - 0.10 * (i % 3), 0.50 - 0.08 * (i % 3));
    Image8 tex = make_noise_texture(64, opt.seed + 200 + i, skin, 0.15);
    std::string name = "textures/human_" + std::to_string(i) + ".png";
    save_png((dir / name).string(), tex);
    human_textures.push_back(name);
    genders.push_back(i % 2 == 0 ? "female" : "male");
  }

  json backgrounds = json::array();
  for (int i = 0; i < opt.background_count; ++i) {
    Vec3 base(0.3 + 0.15 * (i % 3), 0.4 + 0.1 * ((i + 1) % 3), 0.5 + 0.12 * ((i + 2) % 3));
    Image8 bg = make_noise_texture(128, opt.seed + 300 + i, base, 0.5);
    std::string name = "backgrounds/bg_" + std::to_string(i) + ".png";
    save_png((dir / name).string(), bg);
    backgrounds.push_back(name);
  }

  save_clip(dir / "clips" / "grasp.json", make_demo_clip(body.skeleton));

  Image8 wall = make_checker_texture(64, 8, Vec3(0.75, 0.75, 0.78), Vec3(0.62, 0.65, 0.70));
  save_png((dir / "room" / "wall.png").string(), wall);
  save_static_mesh(dir / "room" / "room.json", make_room_mesh(), "wall.png");

  Rng shape_rng(mix64(opt.seed + 400));
  json shape_rows = json::array();
  for (int r = 0; r < opt.shape_table_rows; ++r) {
    json row = json::array();
    for (int c = 0; c < 10; ++c) row.push_back(shape_rng.uniform(-1.4, 1.4));
    shape_rows.push_back(std::move(row));
  }
  save_json_file(dir / "shapes.json", shape_rows);

  json camera = {{"fx", opt.image_size * 1.05},  {"fy", opt.image_size * 1.05},
                 {"cx", opt.image_size / 2.0},   {"cy", opt.image_size / 2.0},
                 {"width", opt.image_size},      {"height", opt.image_size},
                 {"radius", {2.2, 3.4}},         {"height_range", {0.8, 1.9}},
                 {"lookat_jitter_deg", 2.0},     {"target_height", 1.0}};

  json dr;
  dr["mode"] = "DR";
  dr["body_asset"] = "body.json";
  dr["shape_table"] = "shapes.json";
  dr["human_textures"] = human_textures;
  dr["human_texture_genders"] = genders;
  dr["garment_registry"] = "garments";
  dr["backgrounds"] = backgrounds;
  dr["distractors"] = {{"count", {0, 5}}, {"scale", {0.08, 0.4}}, {"region_radius", 2.0},
                       {"height", {0.1, 2.0}}};
  dr["camera"] = camera;
  dr["lights"] = {{"count", {1, 3}}, {"intensity", {0.6, 1.1}}, {"color_temp", {3200, 6500}}};
  dr["animation_clips"] = json::array({"clips/grasp.json"});
  save_json_file(dir / "config_dr.json", dr);

  json sdr;
  sdr["mode"] = "SDR";
  sdr["body_asset"] = "body.json";
  sdr["human_textures"] = human_textures;
  sdr["human_texture_genders"] = genders;
  sdr["garment_registry"] = "garments";
  sdr["room_scene"] = {{"meshes", {"room/room.json"}},
                       {"placement_region", {{-1.6, -1.6}, {1.6, -1.6}, {1.6, 1.6}, {-1.6, 1.6}}},
                       {"ceiling_lights",
                        {{-1.5, -1.5, 2.9}, {1.5, -1.5, 2.9}, {1.5, 1.5, 2.9}, {-1.5, 1.5, 2.9}}}};
  sdr["camera"] = camera;
  sdr["lights"] = {{"count", {2, 4}}, {"intensity", {0.7, 1.2}}, {"color_temp", {3800, 6200}}};
  sdr["animation_clips"] = json::array({"clips/grasp.json"});
  save_json_file(dir / "config_sdr.json", sdr);

  return {dir / "config_dr.json", dir / "config_sdr.json"};
}

}  // namespace medsynth
