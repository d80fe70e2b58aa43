#pragma once

#include "medsynth/mesh.hpp"
#include "medsynth/scene.hpp"

namespace medsynth {

// Unit primitives centered at the origin (extent ~[-0.5, 0.5]); instances
// scale them through their world transform.

inline TemplateMesh make_box() {
  TemplateMesh m;
  const double h = 0.5;
  // per-face vertices so UVs and normals stay clean
  const int faces[6][4][3] = {
      {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1}},  // bottom
      {{-1, -1, 1}, {1, -1, 1}, {1, 1, 1}, {-1, 1, 1}},      // top
      {{-1, -1, -1}, {1, -1, -1}, {1, -1, 1}, {-1, -1, 1}},
      {{-1, 1, -1}, {1, 1, -1}, {1, 1, 1}, {-1, 1, 1}},
      {{-1, -1, -1}, {-1, 1, -1}, {-1, 1, 1}, {-1, -1, 1}},
      {{1, -1, -1}, {1, 1, -1}, {1, 1, 1}, {1, -1, 1}},
  };
  for (const auto& f : faces) {
    std::uint32_t base = static_cast<std::uint32_t>(m.vertices.size());
    for (int i = 0; i < 4; ++i) {
      m.vertices.emplace_back(f[i][0] * h, f[i][1] * h, f[i][2] * h);
      m.uvs.emplace_back(i == 1 || i == 2 ? 1.0 : 0.0, i >= 2 ? 1.0 : 0.0);
    }
    m.triangles.push_back({base, base + 1, base + 2});
    m.triangles.push_back({base, base + 2, base + 3});
  }
  recompute_normals(m);
  return m;
}

inline TemplateMesh make_uv_sphere(int rings = 8, int segments = 12, double radius = 0.5) {
  TemplateMesh m;
  for (int r = 0; r <= rings; ++r) {
    double phi = kPi * r / rings;  // 0 at +z pole
    for (int s = 0; s <= segments; ++s) {
      double theta = 2.0 * kPi * s / segments;
      m.vertices.emplace_back(radius * std::sin(phi) * std::cos(theta),
                              radius * std::sin(phi) * std::sin(theta), radius * std::cos(phi));
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

inline TemplateMesh make_cylinder(int segments = 16, double radius = 0.5, double height = 1.0) {
  TemplateMesh m;
  double hz = height / 2.0;
  for (int cap = 0; cap < 2; ++cap) {
    double z = cap == 0 ? -hz : hz;
    for (int s = 0; s <= segments; ++s) {
      double theta = 2.0 * kPi * s / segments;
      m.vertices.emplace_back(radius * std::cos(theta), radius * std::sin(theta), z);
      m.uvs.emplace_back(static_cast<double>(s) / segments, cap);
    }
  }
  int stride = segments + 1;
  for (int s = 0; s < segments; ++s) {
    std::uint32_t a = s, b = s + 1, c = s + stride, d = s + stride + 1;
    m.triangles.push_back({a, c, b});
    m.triangles.push_back({b, c, d});
  }
  // cap fans
  for (int cap = 0; cap < 2; ++cap) {
    std::uint32_t center = static_cast<std::uint32_t>(m.vertices.size());
    double z = cap == 0 ? -hz : hz;
    m.vertices.emplace_back(0.0, 0.0, z);
    m.uvs.emplace_back(0.5, 0.5);
    std::uint32_t ring = cap * stride;
    for (int s = 0; s < segments; ++s) {
      if (cap == 0)
        m.triangles.push_back({center, ring + s, ring + s + 1});
      else
        m.triangles.push_back({center, ring + s + 1, ring + s});
    }
  }
  recompute_normals(m);
  return m;
}

// Capsule along z: hemispherical caps on a cylinder of the given length.
inline TemplateMesh make_capsule(double radius, double length, int rings = 6, int segments = 8) {
  TemplateMesh m = make_uv_sphere(rings * 2, segments, radius);
  for (Vec3& v : m.vertices) v.z() += v.z() >= 0.0 ? length / 2.0 : -length / 2.0;
  recompute_normals(m);
  return m;
}

inline const TemplateMesh& distractor_mesh(DistractorInstance::Kind kind) {
  static const TemplateMesh box = make_box();
  static const TemplateMesh sphere = make_uv_sphere();
  static const TemplateMesh cylinder = make_cylinder();
  switch (kind) {
    case DistractorInstance::Kind::Box: return box;
    case DistractorInstance::Kind::Sphere: return sphere;
    default: return cylinder;
  }
}

}  // namespace medsynth
