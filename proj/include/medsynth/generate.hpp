#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "medsynth/annotate.hpp"
#include "medsynth/asset_store.hpp"
#include "medsynth/config_io.hpp"
#include "medsynth/dataset_eval.hpp"
#include "medsynth/render.hpp"

namespace medsynth {

struct GenerateOptions {
  int count = 1;
  std::uint64_t master_seed = 0;
  int threads = 0;  // <= 0: hardware concurrency
  std::string split = "train";
};

struct GeneratedDataset {
  fs::path manifest_path;
  DatasetManifest manifest;
};

// Renders one frame of the plan and writes its four buffers + annotation.
inline FrameAnnotation generate_frame(const RandomizationConfig& config, const AssetStore& store,
                                      const FrameSpec& frame, const fs::path& frame_dir) {
  std::vector<RenderInstance> instances = build_instances(frame, store.body, store, config.render);
  const Image8* background = nullptr;
  if (frame.mode == Mode::DR) {
    if (frame.environment.background_index < 0 ||
        frame.environment.background_index >= static_cast<int>(store.backgrounds.size()))
      throw AssetError("background index out of range");
    background = &store.backgrounds[frame.environment.background_index];
  }
  FrameBuffers buffers = rasterize(instances, frame.camera, config.render, frame.lights, background);
  FrameAnnotation ann = annotate_frame(buffers, instances, frame, config.render);

  std::string stem = (frame_dir / frame_file_stem(frame.frame_index)).string();
  save_png(stem + ".rgb.png", buffers.rgb);
  save_png(stem + ".depth.png", buffers.depth);
  save_png(stem + ".cls.png", buffers.class_seg);
  save_png(stem + ".inst.png", buffers.instance_seg);
  export_frame(ann, stem + ".json");
  return ann;
}

// Frames are independent; worker threads pull indices from a counter and the
// manifest is assembled in frame order afterwards, so output never depends
// on scheduling.
inline GeneratedDataset generate_dataset(const RandomizationConfig& config, const AssetStore& store,
                                         const GenerateOptions& opt, const fs::path& out_dir) {
  if (opt.count < 1) throw ValidationError("generate: count must be >= 1");
  fs::path frame_dir = out_dir / opt.split;
  fs::create_directories(frame_dir);

  std::vector<FrameSpec> plan = plan_dataset(config, opt.count, opt.master_seed);
  std::vector<FrameAnnotation> annotations(plan.size());

  int threads = opt.threads > 0 ? opt.threads
                                : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<int>(threads, opt.count);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= plan.size()) return;
      try {
        annotations[i] = generate_frame(config, store, plan[i], frame_dir);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(plan.size());
        return;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  GeneratedDataset out;
  for (const auto& ann : annotations) {
    std::string stem = opt.split + "/" + frame_file_stem(ann.frame_index);
    ManifestEntry e;
    e.frame_index = ann.frame_index;
    e.split = opt.split;
    e.mode = mode_name(ann.mode);
    e.image = stem + ".rgb.png";
    e.depth = stem + ".depth.png";
    e.class_seg = stem + ".cls.png";
    e.instance_seg = stem + ".inst.png";
    e.annotation = stem + ".json";
    out.manifest.entries.push_back(std::move(e));
  }
  out.manifest.name = mode_name(config.mode) + " dataset";
  out.manifest_path = out_dir / "manifest.json";
  save_manifest(out.manifest_path, out.manifest);
  return out;
}

}  // namespace medsynth
