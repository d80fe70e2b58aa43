#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "medsynth/asset_store.hpp"
#include "medsynth/image.hpp"
#include "medsynth/mesh_primitives.hpp"
#include "medsynth/scene.hpp"

namespace medsynth {

// Output of one rasterization. Coupled sentinels: a pixel is background in
// all of depth (0), class_seg (255) and instance_seg (0), or in none.
struct FrameBuffers {
  Image8 rgb;           // 3 channels
  Image16 depth;        // millimeters, 0 = no hit
  Image8 class_seg;     // class ids, 255 = background
  Image16 instance_seg; // instance ids, 0 = background

  int width() const { return rgb.width; }
  int height() const { return rgb.height; }
};

struct RenderInstance {
  TemplateMesh mesh;          // model space (already posed for characters)
  const Image8* texture = nullptr;  // null -> solid_color
  Vec3 solid_color = Vec3(0.7, 0.7, 0.7);
  std::uint8_t class_id = 0;
  std::uint16_t instance_id = 0;
  Affine3 world_from_model = Affine3::Identity();
};

struct PixelSample {
  double u = 0.0, v = 0.0;  // pixel coordinates
  double depth = 0.0;       // camera-space z, meters
};

// Pinhole projection of a world point. Empty when the point sits on or
// behind the near plane (caller clips).
inline std::optional<PixelSample> project(const Vec3& world_point, const CameraModel& camera,
                                          double near_plane = 1e-6) {
  Vec3 c = camera.to_camera(world_point);
  if (c.z() <= near_plane) return std::nullopt;
  PixelSample s;
  s.u = camera.cx + camera.fx * c.x() / c.z();
  s.v = camera.cy + camera.fy * c.y() / c.z();
  s.depth = c.z();
  return s;
}

namespace detail {

struct RasterVertex {
  Vec3 cam;   // camera space
  Vec3 wpos;  // world space
  Vec3 wnrm;
  Vec2 uv;
};

inline RasterVertex lerp(const RasterVertex& a, const RasterVertex& b, double t) {
  RasterVertex out;
  out.cam = (1.0 - t) * a.cam + t * b.cam;
  out.wpos = (1.0 - t) * a.wpos + t * b.wpos;
  out.wnrm = (1.0 - t) * a.wnrm + t * b.wnrm;
  out.uv = (1.0 - t) * a.uv + t * b.uv;
  return out;
}

// Sutherland-Hodgman against z = near; a triangle yields up to 4 vertices.
inline int clip_near(const RasterVertex (&in)[3], double near_plane, RasterVertex (&out)[4]) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const RasterVertex& a = in[i];
    const RasterVertex& b = in[(i + 1) % 3];
    bool ain = a.cam.z() > near_plane;
    bool bin = b.cam.z() > near_plane;
    if (ain) out[n++] = a;
    if (ain != bin) {
      double t = (near_plane - a.cam.z()) / (b.cam.z() - a.cam.z());
      out[n++] = lerp(a, b, t);
    }
  }
  return n;
}

// Visits covered pixel centers of one camera-space triangle with
// perspective-correct barycentric weights (b0+b1+b2 = 1).
template <typename Fn>
void raster_triangle(const RasterVertex& v0, const RasterVertex& v1, const RasterVertex& v2,
                     const CameraModel& cam, Fn&& fn) {
  double z0 = v0.cam.z(), z1 = v1.cam.z(), z2 = v2.cam.z();
  double x0 = cam.cx + cam.fx * v0.cam.x() / z0, y0 = cam.cy + cam.fy * v0.cam.y() / z0;
  double x1 = cam.cx + cam.fx * v1.cam.x() / z1, y1 = cam.cy + cam.fy * v1.cam.y() / z1;
  double x2 = cam.cx + cam.fx * v2.cam.x() / z2, y2 = cam.cy + cam.fy * v2.cam.y() / z2;

  double area2 = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
  if (std::fabs(area2) < 1e-12) return;
  double sign = area2 > 0.0 ? 1.0 : -1.0;

  int px_min = std::max(0, static_cast<int>(std::ceil(std::min({x0, x1, x2}) - 0.5)));
  int px_max = std::min(cam.width - 1, static_cast<int>(std::floor(std::max({x0, x1, x2}) - 0.5)));
  int py_min = std::max(0, static_cast<int>(std::ceil(std::min({y0, y1, y2}) - 0.5)));
  int py_max = std::min(cam.height - 1, static_cast<int>(std::floor(std::max({y0, y1, y2}) - 0.5)));

  double iz0 = 1.0 / z0, iz1 = 1.0 / z1, iz2 = 1.0 / z2;
  for (int py = py_min; py <= py_max; ++py) {
    double py_c = py + 0.5;
    for (int px = px_min; px <= px_max; ++px) {
      double px_c = px + 0.5;
      double w0 = (x2 - x1) * (py_c - y1) - (px_c - x1) * (y2 - y1);
      double w1 = (x0 - x2) * (py_c - y2) - (px_c - x2) * (y0 - y2);
      double w2 = (x1 - x0) * (py_c - y0) - (px_c - x0) * (y1 - y0);
      if (w0 * sign < 0.0 || w1 * sign < 0.0 || w2 * sign < 0.0) continue;
      double l0 = w0 / area2, l1 = w1 / area2, l2 = w2 / area2;
      double inv_z = l0 * iz0 + l1 * iz1 + l2 * iz2;
      if (inv_z <= 0.0) continue;
      double z = 1.0 / inv_z;
      double b0 = l0 * iz0 * z, b1 = l1 * iz1 * z, b2 = l2 * iz2 * z;
      fn(px, py, z, b0, b1, b2);
    }
  }
}

// Transforms one instance into camera space and feeds every (clipped)
// triangle to fn(v0, v1, v2).
template <typename Fn>
void for_each_camera_triangle(const RenderInstance& inst, const CameraModel& camera,
                              double near_plane, Fn&& fn) {
  const TemplateMesh& mesh = inst.mesh;
  Eigen::Matrix3d nrm_xf = inst.world_from_model.linear().inverse().transpose();
  std::vector<RasterVertex> verts(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    RasterVertex& v = verts[i];
    v.wpos = inst.world_from_model * mesh.vertices[i];
    v.wnrm = (nrm_xf * mesh.normals[i]).normalized();
    v.cam = camera.to_camera(v.wpos);
    v.uv = mesh.uvs[i];
  }
  for (const Tri& t : mesh.triangles) {
    RasterVertex tri[3] = {verts[t[0]], verts[t[1]], verts[t[2]]};
    if (tri[0].cam.z() > near_plane && tri[1].cam.z() > near_plane &&
        tri[2].cam.z() > near_plane) {
      fn(tri[0], tri[1], tri[2]);
      continue;
    }
    RasterVertex poly[4];
    int n = clip_near(tri, near_plane, poly);
    for (int k = 2; k < n; ++k) fn(poly[0], poly[k - 1], poly[k]);
  }
}

inline Vec3 shade(const RasterVertex& v0, const RasterVertex& v1, const RasterVertex& v2,
                  double b0, double b1, double b2, const RenderInstance& inst,
                  const std::vector<Light>& lights, double ambient) {
  Vec3 n = (b0 * v0.wnrm + b1 * v1.wnrm + b2 * v2.wnrm);
  double nl = n.norm();
  if (nl > 1e-12) n /= nl;
  Vec3 wpos = b0 * v0.wpos + b1 * v1.wpos + b2 * v2.wpos;

  Vec3 base;
  if (inst.texture && !inst.texture->empty()) {
    Vec2 uv = b0 * v0.uv + b1 * v1.uv + b2 * v2.uv;
    auto t = sample_bilinear(*inst.texture, uv.x(), uv.y());
    base = Vec3(t[0], t[1], t[2]) / 255.0;
  } else {
    base = inst.solid_color;
  }

  Vec3 light = Vec3::Constant(ambient);
  for (const Light& l : lights) {
    Vec3 to_light = l.kind == Light::Kind::Directional ? Vec3(-l.vec) : Vec3(l.vec - wpos);
    double len = to_light.norm();
    if (len < 1e-12) continue;
    double diffuse = std::fabs(n.dot(to_light / len));  // two-sided
    light += l.intensity * diffuse * l.color;
  }
  return base.cwiseProduct(light).cwiseMin(1.0).cwiseMax(0.0);
}

}  // namespace detail

// Z-buffered rasterization of every instance into coupled RGB / depth /
// class / instance buffers. Background pixels take the DR backdrop image
// (resampled) or the flat backdrop color, with sentinel ids and zero depth.
inline FrameBuffers rasterize(const std::vector<RenderInstance>& instances,
                              const CameraModel& camera, const RenderSettings& settings,
                              const std::vector<Light>& lights,
                              const Image8* background = nullptr) {
  camera.validate();
  const int w = camera.width, h = camera.height;

  FrameBuffers fb;
  fb.rgb = Image8(w, h, 3);
  fb.depth = Image16(w, h, 0);
  fb.class_seg = Image8(w, h, 1, kClassBackground);
  fb.instance_seg = Image16(w, h, 0);

  if (background && !background->empty()) {
    Image8 bg = resize_bilinear(*background, w, h);
    fb.rgb.data = std::move(bg.data);
  } else {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        fb.rgb.set_rgb(x, y, settings.backdrop_color[0], settings.backdrop_color[1],
                       settings.backdrop_color[2]);
  }

  std::vector<double> zbuf(static_cast<std::size_t>(w) * h,
                           std::numeric_limits<double>::infinity());

  for (const RenderInstance& inst : instances) {
    detail::for_each_camera_triangle(
        inst, camera, settings.near_plane,
        [&](const detail::RasterVertex& v0, const detail::RasterVertex& v1,
            const detail::RasterVertex& v2) {
          detail::raster_triangle(
              v0, v1, v2, camera, [&](int px, int py, double z, double b0, double b1, double b2) {
                std::size_t idx = static_cast<std::size_t>(py) * w + px;
                if (z >= zbuf[idx]) return;
                zbuf[idx] = z;
                Vec3 c = detail::shade(v0, v1, v2, b0, b1, b2, inst, lights, settings.ambient);
                fb.rgb.set_rgb(px, py, to_u8(c.x() * 255.0), to_u8(c.y() * 255.0),
                               to_u8(c.z() * 255.0));
                fb.depth.data[idx] = static_cast<std::uint16_t>(
                    std::clamp(std::llround(z * 1000.0), 1ll, 65535ll));
                fb.class_seg.data[idx] = inst.class_id;
                fb.instance_seg.data[idx] = inst.instance_id;
              });
        });
  }
  return fb;
}

// Pixels the instance would cover rendered alone (binary, no z-test); the
// denominator of visibility fractions.
inline std::vector<std::uint8_t> coverage_mask(const RenderInstance& inst,
                                               const CameraModel& camera, double near_plane) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(camera.width) * camera.height, 0);
  detail::for_each_camera_triangle(
      inst, camera, near_plane,
      [&](const detail::RasterVertex& v0, const detail::RasterVertex& v1,
          const detail::RasterVertex& v2) {
        detail::raster_triangle(v0, v1, v2, camera,
                                [&](int px, int py, double, double, double, double) {
                                  mask[static_cast<std::size_t>(py) * camera.width + px] = 1;
                                });
      });
  return mask;
}

// Resolve a FrameSpec into render instances: the shaped+posed body, one
// bound garment per class (pushed out along its normals so cloth sits above
// skin), distractors, then room geometry.
inline std::vector<RenderInstance> build_instances(const FrameSpec& frame,
                                                   const ParametricBody& body,
                                                   const AssetStore& store,
                                                   const RenderSettings& settings) {
  std::vector<RenderInstance> instances;
  Affine3 char_world = frame.character_transform();

  TemplateMesh shaped = apply_shape(body.mesh, body.shape_basis, frame.character.shape_coeffs);
  RenderInstance body_inst;
  body_inst.mesh = skin_mesh(shaped, body.skin_weights, body.skeleton, frame.pose);
  if (frame.character.texture_index < 0 ||
      frame.character.texture_index >= static_cast<int>(store.human_textures.size()))
    throw AssetError("human texture index out of range: " +
                     std::to_string(frame.character.texture_index));
  body_inst.texture = &store.human_textures[frame.character.texture_index];
  body_inst.class_id = kClassBody;
  body_inst.instance_id = 1;
  body_inst.world_from_model = char_world;
  instances.push_back(std::move(body_inst));

  for (int g = 0; g < kGarmentClassCount; ++g) {
    const OutfitPick& pick = frame.outfit[g];
    const auto& pool = store.garments[g];
    if (pick.asset_index < 0 || pick.asset_index >= static_cast<int>(pool.size()))
      throw AssetError("garment asset index out of range for class " +
                       garment_class_name(static_cast<GarmentClass>(g)));
    const ClothingAsset& asset = pool[pick.asset_index];

    TemplateMesh garment_shaped =
        apply_shape(asset.mesh, asset.shape_basis, frame.character.shape_coeffs);
    RenderInstance gi;
    gi.mesh = skin_mesh(garment_shaped, asset.weights, body.skeleton, frame.pose);
    double offset = settings.garment_offset_mm * 1e-3 * asset.layer;
    for (std::size_t i = 0; i < gi.mesh.vertices.size(); ++i)
      gi.mesh.vertices[i] += offset * gi.mesh.normals[i];
    if (pick.palette_variant < 0 ||
        pick.palette_variant >= static_cast<int>(asset.palette_variants.size()))
      throw AssetError("palette variant index out of range for " + asset.name);
    gi.texture = &asset.palette_variants[pick.palette_variant];
    gi.class_id = class_id_of(static_cast<GarmentClass>(g));
    gi.instance_id = static_cast<std::uint16_t>(2 + g);
    gi.world_from_model = char_world;
    instances.push_back(std::move(gi));
  }

  std::uint16_t next_id = 2 + kGarmentClassCount;
  for (const DistractorInstance& d : frame.distractors) {
    RenderInstance di;
    di.mesh = distractor_mesh(d.kind);
    di.world_from_model = Eigen::Translation3d(d.position) * d.rotation *
                          Eigen::Scaling(d.scale.x(), d.scale.y(), d.scale.z());
    if (d.texture_index >= 0) {
      if (d.texture_index >= static_cast<int>(store.distractor_textures.size()))
        throw AssetError("distractor texture index out of range");
      di.texture = &store.distractor_textures[d.texture_index];
    } else {
      di.solid_color = d.solid_color;
    }
    di.class_id = static_cast<std::uint8_t>(kClassDistractorBase + static_cast<int>(d.kind));
    di.instance_id = next_id++;
    instances.push_back(std::move(di));
  }

  if (frame.mode == Mode::SDR) {
    for (const StaticMesh& sm : store.room_meshes) {
      RenderInstance ri;
      ri.mesh = sm.mesh;
      if (!sm.texture.empty()) ri.texture = &sm.texture;
      ri.class_id = kClassEnvironment;
      ri.instance_id = next_id++;
      instances.push_back(std::move(ri));
    }
  }
  return instances;
}

}  // namespace medsynth
