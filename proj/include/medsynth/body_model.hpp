#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "medsynth/mesh.hpp"

namespace medsynth {

// Per-coefficient, per-vertex displacement fields added on top of the
// template. displacements[k][i] moves vertex i by coeff k.
struct ShapeBasis {
  int num_coeffs = 0;
  std::vector<std::vector<Vec3>> displacements;

  void validate(std::size_t vertex_count) const {
    if (static_cast<int>(displacements.size()) != num_coeffs)
      throw AssetError("shape basis: displacement field count != num_coeffs");
    for (const auto& field : displacements)
      if (field.size() != vertex_count)
        throw AssetError("shape basis: displacement field size != vertex count");
  }
};

struct Joint {
  std::string name;
  int parent = -1;       // -1 for the root; parents precede children
  Vec3 offset = Vec3::Zero();  // rest-pose offset relative to parent, meters
};

struct Skeleton {
  std::vector<Joint> joints;

  int joint_count() const { return static_cast<int>(joints.size()); }

  void validate() const {
    if (joints.empty()) throw AssetError("skeleton: no joints");
    if (joints[0].parent != -1) throw AssetError("skeleton: root parent must be -1");
    for (int j = 1; j < joint_count(); ++j)
      if (joints[j].parent < 0 || joints[j].parent >= j)
        throw AssetError("skeleton: joints must be topologically ordered");
  }
};

// Up to 4 (joint, weight) influences per vertex; weights sum to 1.
struct SkinWeights {
  std::vector<std::vector<std::pair<int, double>>> vertex_weights;

  void validate(std::size_t vertex_count, int joint_count) const {
    if (vertex_weights.size() != vertex_count)
      throw AssetError("skin weights: entry count != vertex count");
    for (const auto& vw : vertex_weights) {
      if (vw.empty() || vw.size() > 4)
        throw AssetError("skin weights: influences per vertex must be 1..4");
      double sum = 0.0;
      for (auto& [j, w] : vw) {
        if (j < 0 || j >= joint_count) throw AssetError("skin weights: joint index out of range");
        if (w < 0.0) throw AssetError("skin weights: negative weight");
        sum += w;
      }
      if (std::fabs(sum - 1.0) > 1e-6)
        throw AssetError("skin weights: per-vertex weights must sum to 1");
    }
  }
};

// Keeps the strongest 4 influences and renormalizes; ties broken by lower
// joint index. Influence lists come out sorted by joint index.
inline std::vector<std::pair<int, double>> normalize_influences(
    std::vector<std::pair<int, double>> inf) {
  std::stable_sort(inf.begin(), inf.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (inf.size() > 4) inf.resize(4);
  double sum = 0.0;
  for (auto& [j, w] : inf) sum += w;
  if (sum <= 0.0) throw AssetError("skin weights: non-positive weight sum");
  for (auto& [j, w] : inf) w /= sum;
  std::sort(inf.begin(), inf.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return inf;
}

struct Pose {
  std::vector<Quat> rotations;  // unit quaternion per joint, local space
  Vec3 root_translation = Vec3::Zero();

  static Pose identity(int joint_count) {
    Pose p;
    p.rotations.assign(joint_count, Quat::Identity());
    return p;
  }

  void validate(int joint_count) const {
    if (static_cast<int>(rotations.size()) != joint_count)
      throw ValidationError("pose: rotation count != joint count");
    for (const Quat& q : rotations)
      if (std::fabs(q.norm() - 1.0) > 1e-6)
        throw ValidationError("pose: quaternion not unit length");
  }
};

// The loaded character: template + shape space + rig + weights.
struct ParametricBody {
  TemplateMesh mesh;
  ShapeBasis shape_basis;
  Skeleton skeleton;
  SkinWeights skin_weights;

  void validate() const {
    validate_mesh(mesh, "body");
    shape_basis.validate(mesh.vertices.size());
    skeleton.validate();
    skin_weights.validate(mesh.vertices.size(), skeleton.joint_count());
  }
};

// v_i' = v_i + sum_k coeffs[k] * displacements[k][i]. Topology and UVs are
// untouched; normals are recomputed for the deformed geometry.
inline TemplateMesh apply_shape(const TemplateMesh& tmpl, const ShapeBasis& basis,
                                const std::vector<double>& shape_coeffs) {
  if (static_cast<int>(shape_coeffs.size()) != basis.num_coeffs)
    throw ValidationError("apply_shape: coefficient count != basis.num_coeffs");
  TemplateMesh out = tmpl;
  for (int k = 0; k < basis.num_coeffs; ++k) {
    double c = shape_coeffs[k];
    if (c == 0.0) continue;
    const auto& field = basis.displacements[k];
    for (std::size_t i = 0; i < out.vertices.size(); ++i) out.vertices[i] += c * field[i];
  }
  recompute_normals(out);
  return out;
}

// World transform per joint: world[j] = world[parent] * T(offset) * R(q).
// The root additionally carries the pose translation.
inline std::vector<Affine3> forward_kinematics(const Skeleton& skeleton, const Pose& pose) {
  pose.validate(skeleton.joint_count());
  std::vector<Affine3> world(skeleton.joints.size());
  for (int j = 0; j < skeleton.joint_count(); ++j) {
    const Joint& joint = skeleton.joints[j];
    Affine3 local = Eigen::Translation3d(joint.offset) * pose.rotations[j];
    if (joint.parent < 0)
      world[j] = Eigen::Translation3d(pose.root_translation) * local;
    else
      world[j] = world[joint.parent] * local;
  }
  return world;
}

inline std::vector<Affine3> rest_world_transforms(const Skeleton& skeleton) {
  return forward_kinematics(skeleton, Pose::identity(skeleton.joint_count()));
}

// Linear blend skinning: v' = sum_j w_vj * world[j] * rest_world[j]^-1 * v.
// Identity pose is the identity map on vertices.
inline TemplateMesh skin_mesh(const TemplateMesh& mesh, const SkinWeights& weights,
                              const Skeleton& skeleton, const Pose& pose) {
  weights.validate(mesh.vertices.size(), skeleton.joint_count());
  std::vector<Affine3> world = forward_kinematics(skeleton, pose);
  std::vector<Affine3> rest = rest_world_transforms(skeleton);
  std::vector<Affine3> skinning(world.size());
  for (std::size_t j = 0; j < world.size(); ++j) skinning[j] = world[j] * rest[j].inverse();

  TemplateMesh out = mesh;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    Vec3 acc = Vec3::Zero();
    for (const auto& [j, w] : weights.vertex_weights[i]) acc += w * (skinning[j] * mesh.vertices[i]);
    out.vertices[i] = acc;
  }
  recompute_normals(out);
  return out;
}

struct Keyframe {
  double time = 0.0;  // normalized clip time in [0,1], ascending
  Vec3 root_translation = Vec3::Zero();
  std::vector<Quat> rotations;
};

struct AnimationClip {
  std::vector<Keyframe> keyframes;

  void validate(int joint_count) const {
    if (keyframes.empty()) throw AssetError("animation clip: no keyframes");
    for (std::size_t k = 0; k < keyframes.size(); ++k) {
      if (static_cast<int>(keyframes[k].rotations.size()) != joint_count)
        throw AssetError("animation clip: keyframe joint count mismatch");
      if (k > 0 && keyframes[k].time < keyframes[k - 1].time)
        throw AssetError("animation clip: keyframe times must ascend");
    }
  }

  // Frames one body shape gets by default: one frame per keyframe interval.
  int interval_count() const { return std::max(1, static_cast<int>(keyframes.size()) - 1); }
};

// Slerp rotations / lerp translation between the bracketing keyframes.
inline Pose sample_animation(const AnimationClip& clip, double t) {
  if (clip.keyframes.empty()) throw AssetError("sample_animation: empty clip");
  if (t < 0.0 || t > 1.0) throw std::out_of_range("sample_animation: t outside [0,1]");

  auto as_pose = [](const Keyframe& k) {
    Pose p;
    p.rotations = k.rotations;
    p.root_translation = k.root_translation;
    return p;
  };

  const auto& keys = clip.keyframes;
  if (t <= keys.front().time) return as_pose(keys.front());
  if (t >= keys.back().time) return as_pose(keys.back());
  std::size_t hi = 1;
  while (keys[hi].time < t) ++hi;
  const Keyframe& a = keys[hi - 1];
  const Keyframe& b = keys[hi];
  double span = b.time - a.time;
  double f = span > 0.0 ? (t - a.time) / span : 1.0;

  Pose p;
  p.root_translation = (1.0 - f) * a.root_translation + f * b.root_translation;
  p.rotations.resize(a.rotations.size());
  for (std::size_t j = 0; j < a.rotations.size(); ++j)
    p.rotations[j] = a.rotations[j].slerp(f, b.rotations[j]).normalized();
  return p;
}

}  // namespace medsynth
