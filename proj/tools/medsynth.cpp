// medsynth command line: generate / composite / split / augment / evaluate /
// stats. All randomness flows from --seed; reruns into a fresh directory are
// byte-identical.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "medsynth/medsynth.hpp"

namespace ms = medsynth;
namespace fs = std::filesystem;

namespace {

struct SplitRatios {
  std::array<double, 3> values{0.6, 0.1, 0.3};
};

std::array<double, 3> parse_ratios(const std::string& text) {
  std::array<double, 3> out{0, 0, 0};
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &out[0], &out[1], &out[2]) != 3)
    throw ms::ValidationError("--ratios expects train,val,test (e.g. 0.6,0.1,0.3)");
  return out;
}

std::vector<fs::path> sorted_pngs(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw ms::ConfigError("not a directory: " + dir.string());
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".png") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_generate(const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
                 int count, int threads, const std::string& split, const std::string& format) {
  ms::RandomizationConfig config = ms::load_config(config_path);
  ms::AssetStore store = ms::load_asset_store(config);
  ms::GenerateOptions opt;
  opt.count = count;
  opt.master_seed = seed;
  opt.threads = threads;
  opt.split = split;
  ms::GeneratedDataset ds = ms::generate_dataset(config, store, opt, out_dir);
  if (format == "coco") {
    std::vector<ms::FrameAnnotation> anns;
    std::vector<std::string> splits;
    fs::path dir = fs::absolute(ds.manifest_path).parent_path();
    for (const auto& e : ds.manifest.entries) {
      anns.push_back(ms::load_frame_annotation(dir / e.annotation));
      splits.push_back(e.split);
    }
    ms::export_manifest(anns, splits, ms::ManifestFormat::CocoLike,
                        fs::path(out_dir) / "annotations_coco.json");
  }
  std::printf("generated %d frames into %s\n", count, out_dir.c_str());
  return 0;
}

int cmd_composite(const std::string& fg_dir, const std::string& bg_dir, const std::string& out_dir,
                  std::uint64_t seed, const ms::ChromaKeyConfig& cfg) {
  auto foregrounds = sorted_pngs(fg_dir);
  auto backgrounds = sorted_pngs(bg_dir);
  if (foregrounds.empty()) throw ms::ConfigError("foreground directory has no PNG files");
  if (backgrounds.empty()) throw ms::ConfigError("background directory has no PNG files");
  fs::create_directories(out_dir);

  for (std::size_t i = 0; i < foregrounds.size(); ++i) {
    ms::Rng rng(ms::stream_seed(seed, i));
    const fs::path& fg_path = foregrounds[i];
    ms::Image8 fg = ms::load_png_rgb8(fg_path.string());
    const fs::path& bg_path = backgrounds[rng.index(backgrounds.size())];
    ms::Image8 bg = ms::load_png_rgb8(bg_path.string());
    ms::Image8 out = ms::chroma_composite(fg, bg, cfg);
    ms::save_png((fs::path(out_dir) / fg_path.filename()).string(), out);
    // annotations ride along unchanged
    fs::path ann = fg_path;
    ann.replace_extension(".json");
    if (fs::exists(ann)) fs::copy_file(ann, fs::path(out_dir) / ann.filename(),
                                       fs::copy_options::overwrite_existing);
  }
  std::printf("composited %zu images into %s\n", foregrounds.size(), out_dir.c_str());
  return 0;
}

int cmd_split(const std::string& manifest_path, const std::string& out_path,
              const std::string& ratios_text, std::uint64_t seed, bool by_group) {
  ms::DatasetManifest m = ms::load_manifest(manifest_path);
  ms::DatasetManifest out = ms::split_manifest(m, parse_ratios(ratios_text), seed, by_group);
  ms::save_manifest(out_path, out);
  auto counts = ms::split_counts(out);
  std::printf("train %zu, validation %zu, test %zu -> %s\n", counts[0], counts[1], counts[2],
              out_path.c_str());
  return 0;
}

bool mode_selected(const std::string& modes_csv, const std::string& mode) {
  if (modes_csv.empty() || modes_csv == "all") return true;
  std::size_t pos = 0;
  while (pos <= modes_csv.size()) {
    std::size_t comma = modes_csv.find(',', pos);
    std::string tok = modes_csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (tok == mode) return true;
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return false;
}

std::vector<ms::LabeledBox> boxes_from_annotation(const fs::path& path) {
  std::vector<ms::LabeledBox> boxes;
  ms::FrameAnnotation ann = ms::load_frame_annotation(path);
  for (const auto& o : ann.objects) {
    if (o.class_id >= 7) continue;
    boxes.push_back({o.class_id, static_cast<double>(o.bbox.x_min),
                     static_cast<double>(o.bbox.y_min), static_cast<double>(o.bbox.x_max),
                     static_cast<double>(o.bbox.y_max)});
  }
  return boxes;
}

void save_label_file(const fs::path& path, const std::vector<ms::LabeledBox>& boxes) {
  ms::json objects = ms::json::array();
  for (const auto& b : boxes) {
    objects.push_back({{"class_id", b.class_id},
                       {"class_name", ms::annotation_class_name(b.class_id)},
                       {"bbox",
                        {static_cast<int>(std::llround(b.x_min)), static_cast<int>(std::llround(b.y_min)),
                         static_cast<int>(std::llround(b.x_max)), static_cast<int>(std::llround(b.y_max))}}});
  }
  ms::save_json_file(path, ms::json{{"objects", std::move(objects)}});
}

int cmd_augment(const std::string& manifest_path, const std::string& out_dir,
                const std::string& op, std::uint64_t seed, const std::string& modes,
                double alpha, double beta, int size, double p, double lo, double hi) {
  ms::DatasetManifest manifest = ms::load_manifest(manifest_path);
  fs::path in_dir = fs::absolute(fs::path(manifest_path)).parent_path();
  fs::create_directories(out_dir);

  std::vector<const ms::ManifestEntry*> selected;
  for (const auto& e : manifest.entries)
    if (mode_selected(modes, e.mode)) selected.push_back(&e);
  if (selected.empty()) throw ms::ValidationError("no manifest entries match the mode selection");

  ms::DatasetManifest out_manifest;
  out_manifest.name = manifest.name + " (" + op + ")";

  if (op == "mosaic") {
    ms::MosaicConfig cfg;
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.output_size = size;
    int out_index = 0;
    for (std::size_t i = 0; i + 4 <= selected.size(); i += 4, ++out_index) {
      std::array<ms::MosaicInput, 4> inputs;
      for (int q = 0; q < 4; ++q) {
        const ms::ManifestEntry& e = *selected[i + q];
        inputs[q].image = ms::load_png_rgb8((in_dir / e.image).string());
        if (!e.annotation.empty()) inputs[q].boxes = boxes_from_annotation(in_dir / e.annotation);
      }
      ms::MosaicResult result = ms::mosaic(inputs, cfg, ms::stream_seed(seed, out_index));
      std::string stem = ms::frame_file_stem(out_index);
      ms::save_png((fs::path(out_dir) / (stem + ".rgb.png")).string(), result.image);
      save_label_file(fs::path(out_dir) / (stem + ".json"), result.boxes);
      ms::ManifestEntry e;
      e.frame_index = out_index;
      e.mode = selected[i]->mode;
      e.split = selected[i]->split;
      e.image = stem + ".rgb.png";
      e.annotation = stem + ".json";
      out_manifest.entries.push_back(std::move(e));
    }
    if (out_manifest.entries.empty())
      throw ms::ValidationError("mosaic needs at least 4 selected entries");
  } else if (op == "green") {
    for (std::size_t i = 0; i < selected.size(); ++i) {
      const ms::ManifestEntry& e = *selected[i];
      ms::Image8 img = ms::load_png_rgb8((in_dir / e.image).string());
      ms::Image8 out = ms::green_channel_aug(img, ms::stream_seed(seed, i), p, lo, hi);
      std::string stem = ms::frame_file_stem(e.frame_index);
      ms::save_png((fs::path(out_dir) / (stem + ".rgb.png")).string(), out);
      ms::ManifestEntry oe = e;
      oe.image = stem + ".rgb.png";
      oe.depth.clear();
      oe.class_seg.clear();
      oe.instance_seg.clear();
      if (!e.annotation.empty()) {
        fs::copy_file(in_dir / e.annotation, fs::path(out_dir) / (stem + ".json"),
                      fs::copy_options::overwrite_existing);
        oe.annotation = stem + ".json";
      }
      out_manifest.entries.push_back(std::move(oe));
    }
  } else {
    throw ms::ValidationError("unknown augment op: " + op + " (use mosaic or green)");
  }

  ms::save_manifest(fs::path(out_dir) / "manifest.json", out_manifest);
  std::printf("wrote %zu augmented entries into %s\n", out_manifest.entries.size(),
              out_dir.c_str());
  return 0;
}

int cmd_evaluate(const std::string& manifest_path, const std::string& predictions_path,
                 double conf_threshold, double iou_threshold, const std::string& split,
                 const std::string& out_dir) {
  ms::DatasetManifest manifest = ms::load_manifest(manifest_path);
  std::vector<ms::DetectionRecord> predictions = ms::load_predictions_jsonl(predictions_path);
  ms::EvalReport report =
      ms::evaluate_manifest(manifest_path, manifest, predictions, conf_threshold, iou_threshold, split);
  std::string text = ms::format_report_text(report);
  std::fputs(text.c_str(), stdout);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream txt(fs::path(out_dir) / "report.txt");
    txt << text;
    ms::save_json_file(fs::path(out_dir) / "report.json", ms::report_to_json(report));
  }
  return 0;
}

int cmd_stats(const std::string& manifest_path) {
  ms::DatasetManifest m = ms::load_manifest(manifest_path);
  ms::check_manifest_integrity(manifest_path, m);
  auto counts = ms::split_counts(m);
  std::printf("%-24s %8s %12s %8s\n", "dataset name", "train", "validation", "test");
  std::printf("%-24s %8zu %12zu %8zu\n", m.name.empty() ? "(unnamed)" : m.name.c_str(), counts[0],
              counts[1], counts[2]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic medical-clothing dataset toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, manifest_path, predictions_path;
  std::string split = "train", eval_split = "test", format = "native";
  std::string fg_dir, bg_dir, ratios = "0.6,0.1,0.3", op = "mosaic", modes = "all";
  std::uint64_t seed = 0;
  int count = 1, threads = 0, mosaic_size = 896;
  double alpha = 20.0, beta = 20.0, p = 0.5, lo = 0.6, hi = 1.4;
  double conf_threshold = 0.2, iou_threshold = 0.5;
  bool by_group = false;
  ms::ChromaKeyConfig chroma;

  auto* gen = app.add_subcommand("generate", "Render a DR/SDR dataset with ground truth");
  gen->add_option("--config", config_path, "randomization config JSON")->required();
  gen->add_option("--out", out_dir, "output dataset directory")->required();
  gen->add_option("--seed", seed, "master seed")->envname("MEDSYNTH_SEED");
  gen->add_option("--count", count, "number of frames")->required();
  gen->add_option("--threads", threads, "worker threads (0 = auto)")->envname("MEDSYNTH_THREADS");
  gen->add_option("--split", split, "split tag for generated entries");
  gen->add_option("--format", format, "manifest format: native | coco (coco adds a COCO-style file)")
      ->check(CLI::IsMember({"native", "coco"}));

  auto* comp = app.add_subcommand("composite", "Chroma-key foregrounds over random backgrounds");
  comp->add_option("--foreground", fg_dir, "directory of greenscreen PNGs")->required();
  comp->add_option("--background", bg_dir, "directory of background PNGs")->required();
  comp->add_option("--out", out_dir, "output directory")->required();
  comp->add_option("--seed", seed, "pairing seed")->envname("MEDSYNTH_SEED");
  comp->add_option("--dominance", chroma.dominance, "green dominance ratio (> 1)");
  comp->add_option("--min-green", chroma.min_green, "minimum green level (0-255)");
  comp->add_option("--softness", chroma.softness, "edge blend band, pixels");

  auto* spl = app.add_subcommand("split", "Assign train/val/test split tags");
  spl->add_option("--manifest", manifest_path, "input manifest")->required();
  spl->add_option("--out", out_dir, "output manifest path")->required();
  spl->add_option("--ratios", ratios, "train,val,test ratios summing to 1");
  spl->add_option("--seed", seed, "shuffle seed")->envname("MEDSYNTH_SEED");
  spl->add_flag("--by-group", by_group, "split whole groups (e.g. persons) together");

  auto* aug = app.add_subcommand("augment", "Batch mosaic / green-channel augmentation");
  aug->add_option("--manifest", manifest_path, "input manifest")->required();
  aug->add_option("--out", out_dir, "output directory")->required();
  aug->add_option("--op", op, "mosaic | green")->check(CLI::IsMember({"mosaic", "green"}));
  aug->add_option("--seed", seed, "augmentation seed")->envname("MEDSYNTH_SEED");
  aug->add_option("--modes", modes, "comma list of entry modes to augment (default all)");
  aug->add_option("--alpha", alpha, "mosaic center Beta alpha");
  aug->add_option("--beta", beta, "mosaic center Beta beta");
  aug->add_option("--size", mosaic_size, "mosaic output size, pixels");
  aug->add_option("--p", p, "green aug probability");
  aug->add_option("--lo", lo, "green factor range low");
  aug->add_option("--hi", hi, "green factor range high");

  auto* eva = app.add_subcommand("evaluate", "Detection metrics against a manifest split");
  eva->add_option("--manifest", manifest_path, "dataset manifest")->required();
  eva->add_option("--predictions", predictions_path, "JSON-lines prediction file")->required();
  eva->add_option("--conf-threshold", conf_threshold, "P/R confidence threshold");
  eva->add_option("--iou-threshold", iou_threshold, "P/R IoU threshold");
  eva->add_option("--split", eval_split, "manifest split to evaluate against");
  eva->add_option("--out", out_dir, "directory for report.txt / report.json");

  auto* sta = app.add_subcommand("stats", "Per-split counts of a manifest");
  sta->add_option("--manifest", manifest_path, "dataset manifest")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(config_path, out_dir, seed, count, threads, split, format);
    if (comp->parsed()) return cmd_composite(fg_dir, bg_dir, out_dir, seed, chroma);
    if (spl->parsed()) return cmd_split(manifest_path, out_dir, ratios, seed, by_group);
    if (aug->parsed())
      return cmd_augment(manifest_path, out_dir, op, seed, modes, alpha, beta, mosaic_size, p, lo, hi);
    if (eva->parsed())
      return cmd_evaluate(manifest_path, predictions_path, conf_threshold, iou_threshold,
                          eval_split, out_dir);
    if (sta->parsed()) return cmd_stats(manifest_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
