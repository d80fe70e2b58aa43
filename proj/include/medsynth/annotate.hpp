#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "medsynth/manifest.hpp"
#include "medsynth/render.hpp"

namespace medsynth {

// Pixel box, max exclusive: x in [x_min, x_max), y in [y_min, y_max).
struct BoundingBox2D {
  int x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  int width() const { return x_max - x_min; }
  int height() const { return y_max - y_min; }

  bool valid(int image_width, int image_height) const {
    return 0 <= x_min && x_min < x_max && x_max <= image_width && 0 <= y_min && y_min < y_max &&
           y_max <= image_height;
  }

  bool operator==(const BoundingBox2D&) const = default;
};

// Tight bounds of pixels equal to instance_id; absent when none.
inline std::optional<BoundingBox2D> bbox_from_mask(const Image16& instance_seg,
                                                   std::uint16_t instance_id) {
  BoundingBox2D box{instance_seg.width, instance_seg.height, -1, -1};
  bool found = false;
  for (int y = 0; y < instance_seg.height; ++y) {
    for (int x = 0; x < instance_seg.width; ++x) {
      if (instance_seg.at(x, y) != instance_id) continue;
      found = true;
      box.x_min = std::min(box.x_min, x);
      box.y_min = std::min(box.y_min, y);
      box.x_max = std::max(box.x_max, x + 1);
      box.y_max = std::max(box.y_max, y + 1);
    }
  }
  if (!found) return std::nullopt;
  return box;
}

struct ObjectAnnotation {
  int class_id = 0;
  std::uint16_t instance_id = 0;
  BoundingBox2D bbox;
  std::int64_t visible_pixels = 0;
  double visibility_fraction = 0.0;  // visible / pixels covered rendered alone
  Vec3 world_position = Vec3::Zero();
};

struct FrameAnnotation {
  int frame_index = 0;
  CameraModel camera;
  std::vector<ObjectAnnotation> objects;
  std::uint64_t seed = 0;
  Mode mode = Mode::DR;
};

inline std::string annotation_class_name(int class_id) {
  if (class_id >= 0 && class_id < 7) return detection_class_names()[class_id];
  return class_id >= kClassEnvironment ? "environment" : "distractor";
}

namespace detail {

struct MaskStats {
  std::int64_t pixels = 0;
  int x_min = 1 << 30, y_min = 1 << 30, x_max = -1, y_max = -1;

  void add(int x, int y) {
    ++pixels;
    x_min = std::min(x_min, x);
    y_min = std::min(y_min, y);
    x_max = std::max(x_max, x + 1);
    y_max = std::max(y_max, y + 1);
  }

  BoundingBox2D box() const { return {x_min, y_min, x_max, y_max}; }
};

}  // namespace detail

// Ground truth for one rendered frame. The human (class 0) is annotated as
// the union of the body and every worn garment; garments and distractors
// carry their own visible pixels. Objects under min_visibility are dropped.
inline FrameAnnotation annotate_frame(const FrameBuffers& buffers,
                                      const std::vector<RenderInstance>& instances,
                                      const FrameSpec& frame, const RenderSettings& settings) {
  if (buffers.width() != frame.camera.width || buffers.height() != frame.camera.height)
    throw ValidationError("annotate_frame: buffers do not match the frame camera");

  std::set<std::uint16_t> person_ids;
  for (const RenderInstance& inst : instances)
    if (inst.class_id < 7) person_ids.insert(inst.instance_id);

  std::map<std::uint16_t, detail::MaskStats> visible;
  detail::MaskStats person_visible;
  for (int y = 0; y < buffers.height(); ++y) {
    for (int x = 0; x < buffers.width(); ++x) {
      std::uint16_t id = buffers.instance_seg.at(x, y);
      if (id == 0) continue;
      visible[id].add(x, y);
      if (person_ids.count(id)) person_visible.add(x, y);
    }
  }

  FrameAnnotation ann;
  ann.frame_index = frame.frame_index;
  ann.camera = frame.camera;
  ann.seed = frame.seed;
  ann.mode = frame.mode;

  const RenderInstance* body_inst = nullptr;
  std::vector<std::uint8_t> person_cover;
  for (const RenderInstance& inst : instances) {
    if (inst.class_id >= kClassEnvironment) continue;  // room geometry is context, not an object

    std::vector<std::uint8_t> cover = coverage_mask(inst, frame.camera, settings.near_plane);
    if (inst.class_id < 7) {
      if (person_cover.empty()) person_cover.assign(cover.size(), 0);
      for (std::size_t i = 0; i < cover.size(); ++i) person_cover[i] |= cover[i];
      if (inst.class_id == kClassBody) body_inst = &inst;
      if (inst.class_id == kClassBody) continue;  // body merges into the human annotation
    }

    auto it = visible.find(inst.instance_id);
    if (it == visible.end()) continue;
    std::int64_t alone = 0;
    for (std::uint8_t c : cover) alone += c;
    if (alone == 0) continue;
    double fraction = static_cast<double>(it->second.pixels) / static_cast<double>(alone);
    if (fraction < settings.min_visibility) continue;

    ObjectAnnotation obj;
    obj.class_id = inst.class_id;
    obj.instance_id = inst.instance_id;
    obj.bbox = it->second.box();
    obj.visible_pixels = it->second.pixels;
    obj.visibility_fraction = std::min(fraction, 1.0);
    obj.world_position = inst.world_from_model.translation();
    ann.objects.push_back(obj);
  }

  if (body_inst && person_visible.pixels > 0) {
    std::int64_t union_alone = 0;
    for (std::uint8_t c : person_cover) union_alone += c;
    double fraction =
        union_alone > 0 ? static_cast<double>(person_visible.pixels) / union_alone : 0.0;
    if (union_alone > 0 && fraction >= settings.min_visibility) {
      ObjectAnnotation human;
      human.class_id = kClassBody;
      human.instance_id = body_inst->instance_id;
      human.bbox = person_visible.box();
      human.visible_pixels = person_visible.pixels;
      human.visibility_fraction = std::min(fraction, 1.0);
      human.world_position = body_inst->world_from_model.translation();
      ann.objects.insert(ann.objects.begin(), human);
    }
  }
  return ann;
}

inline json annotation_to_json(const FrameAnnotation& ann) {
  json j;
  j["frame_index"] = ann.frame_index;
  j["mode"] = mode_name(ann.mode);
  j["seed"] = ann.seed;
  json cam;
  cam["fx"] = ann.camera.fx;
  cam["fy"] = ann.camera.fy;
  cam["cx"] = ann.camera.cx;
  cam["cy"] = ann.camera.cy;
  cam["width"] = ann.camera.width;
  cam["height"] = ann.camera.height;
  json m = json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m.push_back(ann.camera.world_to_camera(r, c));
  cam["world_to_camera"] = std::move(m);
  j["camera"] = std::move(cam);
  json objects = json::array();
  for (const ObjectAnnotation& o : ann.objects) {
    objects.push_back({{"class_id", o.class_id},
                       {"class_name", annotation_class_name(o.class_id)},
                       {"instance_id", o.instance_id},
                       {"bbox", {o.bbox.x_min, o.bbox.y_min, o.bbox.x_max, o.bbox.y_max}},
                       {"visibility", o.visibility_fraction},
                       {"visible_pixels", o.visible_pixels},
                       {"world_position",
                        {o.world_position.x(), o.world_position.y(), o.world_position.z()}}});
  }
  j["objects"] = std::move(objects);
  return j;
}

inline void export_frame(const FrameAnnotation& ann, const fs::path& path) {
  save_json_file(path, annotation_to_json(ann));
}

inline FrameAnnotation load_frame_annotation(const fs::path& path) {
  json j = load_json_file(path);
  FrameAnnotation ann;
  ann.frame_index = j.at("frame_index").get<int>();
  ann.mode = mode_from_name(j.at("mode").get<std::string>());
  ann.seed = j.at("seed").get<std::uint64_t>();
  const json& cam = j.at("camera");
  ann.camera.fx = cam.at("fx").get<double>();
  ann.camera.fy = cam.at("fy").get<double>();
  ann.camera.cx = cam.at("cx").get<double>();
  ann.camera.cy = cam.at("cy").get<double>();
  ann.camera.width = cam.at("width").get<int>();
  ann.camera.height = cam.at("height").get<int>();
  const json& m = cam.at("world_to_camera");
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) ann.camera.world_to_camera(r, c) = m[r * 4 + c].get<double>();
  for (const auto& jo : j.at("objects")) {
    ObjectAnnotation o;
    o.class_id = jo.at("class_id").get<int>();
    o.instance_id = jo.at("instance_id").get<std::uint16_t>();
    const auto& b = jo.at("bbox");
    o.bbox = {b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
    o.visibility_fraction = jo.at("visibility").get<double>();
    o.visible_pixels = jo.value("visible_pixels", std::int64_t{0});
    const auto& p = jo.at("world_position");
    o.world_position = Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    ann.objects.push_back(o);
  }
  return ann;
}

// Standard frame-file naming: {frame:06}.{rgb|depth|cls|inst}.png + .json
inline std::string frame_file_stem(int frame_index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", frame_index);
  return buf;
}

enum class ManifestFormat { Native, CocoLike };

// Native: index of frame files + split tags. Coco-like: one document with
// images / annotations ([x,y,w,h] boxes) / the 7 detection categories.
inline void export_manifest(const std::vector<FrameAnnotation>& frames,
                            const std::vector<std::string>& splits, ManifestFormat format,
                            const fs::path& path) {
  if (frames.empty()) throw ValidationError("export_manifest: no frames");
  if (!splits.empty() && splits.size() != frames.size())
    throw ValidationError("export_manifest: split tag count mismatch");
  std::set<int> seen;
  for (const auto& f : frames)
    if (!seen.insert(f.frame_index).second)
      throw ValidationError("export_manifest: duplicate frame_index " +
                            std::to_string(f.frame_index));

  auto split_of = [&](std::size_t i) { return splits.empty() ? std::string("train") : splits[i]; };

  if (format == ManifestFormat::Native) {
    DatasetManifest m;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const FrameAnnotation& f = frames[i];
      std::string stem = split_of(i) + "/" + frame_file_stem(f.frame_index);
      ManifestEntry e;
      e.frame_index = f.frame_index;
      e.split = split_of(i);
      e.mode = mode_name(f.mode);
      e.image = stem + ".rgb.png";
      e.depth = stem + ".depth.png";
      e.class_seg = stem + ".cls.png";
      e.instance_seg = stem + ".inst.png";
      e.annotation = stem + ".json";
      m.entries.push_back(std::move(e));
    }
    save_manifest(path, m);
    return;
  }

  json doc;
  json images = json::array();
  json annotations = json::array();
  int ann_id = 1;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const FrameAnnotation& f = frames[i];
    images.push_back({{"id", f.frame_index},
                      {"file_name", split_of(i) + "/" + frame_file_stem(f.frame_index) + ".rgb.png"},
                      {"width", f.camera.width},
                      {"height", f.camera.height}});
    for (const ObjectAnnotation& o : f.objects) {
      if (o.class_id >= 7) continue;  // context objects are not detector categories
      annotations.push_back({{"id", ann_id++},
                             {"image_id", f.frame_index},
                             {"category_id", o.class_id},
                             {"bbox", {o.bbox.x_min, o.bbox.y_min, o.bbox.width(), o.bbox.height()}},
                             {"area", o.bbox.width() * o.bbox.height()},
                             {"iscrowd", 0}});
    }
  }
  json categories = json::array();
  for (int c = 0; c < 7; ++c)
    categories.push_back({{"id", c}, {"name", detection_class_names()[c]}});
  doc["images"] = std::move(images);
  doc["annotations"] = std::move(annotations);
  doc["categories"] = std::move(categories);
  save_json_file(path, doc);
}

}  // namespace medsynth
