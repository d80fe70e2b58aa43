#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "medsynth/error.hpp"

namespace medsynth {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat4 = Eigen::Matrix4d;
using Quat = Eigen::Quaterniond;
using Affine3 = Eigen::Affine3d;
using Tri = std::array<std::uint32_t, 3>;

// Triangle mesh with per-vertex UVs and unit normals. Positions in meters.
struct TemplateMesh {
  std::vector<Vec3> vertices;
  std::vector<Tri> triangles;
  std::vector<Vec2> uvs;
  std::vector<Vec3> normals;
};

// Area-weighted vertex normals from current geometry.
inline void recompute_normals(TemplateMesh& mesh) {
  mesh.normals.assign(mesh.vertices.size(), Vec3::Zero());
  for (const Tri& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    Vec3 n = (b - a).cross(c - a);  // magnitude = 2 * area
    mesh.normals[t[0]] += n;
    mesh.normals[t[1]] += n;
    mesh.normals[t[2]] += n;
  }
  for (Vec3& n : mesh.normals) {
    double len = n.norm();
    n = len > 1e-12 ? Vec3(n / len) : Vec3(0, 0, 1);
  }
}

inline void validate_mesh(const TemplateMesh& mesh, const std::string& what) {
  if (mesh.vertices.empty() || mesh.triangles.empty())
    throw AssetError(what + ": empty mesh");
  for (const Tri& t : mesh.triangles)
    for (std::uint32_t idx : t)
      if (idx >= mesh.vertices.size())
        throw AssetError(what + ": triangle index out of range");
  if (mesh.uvs.size() != mesh.vertices.size())
    throw AssetError(what + ": uv count != vertex count");
}

inline TemplateMesh transformed(const TemplateMesh& mesh, const Affine3& xf) {
  TemplateMesh out = mesh;
  Eigen::Matrix3d nrm_xf = xf.linear().inverse().transpose();
  for (auto& v : out.vertices) v = xf * v;
  for (auto& n : out.normals) {
    Vec3 t = nrm_xf * n;
    double len = t.norm();
    n = len > 1e-12 ? Vec3(t / len) : Vec3(0, 0, 1);
  }
  return out;
}

inline void append_mesh(TemplateMesh& dst, const TemplateMesh& src) {
  std::uint32_t base = static_cast<std::uint32_t>(dst.vertices.size());
  dst.vertices.insert(dst.vertices.end(), src.vertices.begin(), src.vertices.end());
  dst.uvs.insert(dst.uvs.end(), src.uvs.begin(), src.uvs.end());
  dst.normals.insert(dst.normals.end(), src.normals.begin(), src.normals.end());
  for (const Tri& t : src.triangles)
    dst.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

}  // namespace medsynth
