#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "medsynth/annotate.hpp"
#include "medsynth/manifest.hpp"
#include "medsynth/rng.hpp"

namespace medsynth {

using Box = std::array<double, 4>;  // x_min, y_min, x_max, y_max

inline double iou(const Box& a, const Box& b) {
  double ix = std::max(0.0, std::min(a[2], b[2]) - std::max(a[0], b[0]));
  double iy = std::max(0.0, std::min(a[3], b[3]) - std::max(a[1], b[1]));
  double inter = ix * iy;
  double area_a = std::max(0.0, a[2] - a[0]) * std::max(0.0, a[3] - a[1]);
  double area_b = std::max(0.0, b[2] - b[0]) * std::max(0.0, b[3] - b[1]);
  double uni = area_a + area_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

inline double iou(const BoundingBox2D& a, const BoundingBox2D& b) {
  return iou(Box{static_cast<double>(a.x_min), static_cast<double>(a.y_min),
                 static_cast<double>(a.x_max), static_cast<double>(a.y_max)},
             Box{static_cast<double>(b.x_min), static_cast<double>(b.y_min),
                 static_cast<double>(b.x_max), static_cast<double>(b.y_max)});
}

// One predicted box; read from JSON-lines prediction files.
struct DetectionRecord {
  int frame = 0;
  int class_id = 0;
  Box bbox{0, 0, 0, 0};
  double confidence = 0.0;

  void validate() const {
    if (bbox[0] >= bbox[2] || bbox[1] >= bbox[3])
      throw ValidationError("detection: degenerate bbox");
    if (confidence < 0.0 || confidence > 1.0)
      throw ValidationError("detection: confidence outside [0,1]");
  }
};

inline std::vector<DetectionRecord> load_predictions_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<DetectionRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line);
    DetectionRecord d;
    d.frame = j.at("frame").get<int>();
    d.class_id = j.at("class_id").get<int>();
    const auto& b = j.at("bbox");
    d.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    d.confidence = j.at("confidence").get<double>();
    d.validate();
    out.push_back(d);
  }
  return out;
}

inline void save_predictions_jsonl(const fs::path& path, const std::vector<DetectionRecord>& dets) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& d : dets) {
    json j = {{"frame", d.frame},
              {"class_id", d.class_id},
              {"bbox", {d.bbox[0], d.bbox[1], d.bbox[2], d.bbox[3]}},
              {"confidence", d.confidence}};
    out << j.dump() << "\n";
  }
}

struct ScoredBox {
  Box box{0, 0, 0, 0};
  double confidence = 0.0;
};

struct MatchResult {
  std::vector<bool> det_is_tp;   // aligned with the input detection order
  std::vector<int> det_gt;       // matched ground-truth index or -1
  std::vector<bool> gt_matched;  // aligned with the input ground-truth order
};

// Greedy one-to-one matching: detections in descending confidence (ties by
// insertion order) each take the unmatched GT with the highest IoU >=
// threshold (IoU ties by lower GT index).
inline MatchResult match_detections(const std::vector<ScoredBox>& detections,
                                    const std::vector<Box>& ground_truth, double iou_threshold) {
  MatchResult r;
  r.det_is_tp.assign(detections.size(), false);
  r.det_gt.assign(detections.size(), -1);
  r.gt_matched.assign(ground_truth.size(), false);

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].confidence > detections[b].confidence;
  });

  for (std::size_t oi : order) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (r.gt_matched[g]) continue;
      double v = iou(detections[oi].box, ground_truth[g]);
      if (v < iou_threshold) continue;
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0) {
      r.det_is_tp[oi] = true;
      r.det_gt[oi] = best;
      r.gt_matched[best] = true;
    }
  }
  return r;
}

// 101-point interpolated average precision (recall grid 0.00, 0.01, ... 1.00;
// interpolated precision = max precision at recall >= r). Zero when there is
// no ground truth.
inline double average_precision(std::vector<std::pair<double, bool>> scored_flags, int num_gt) {
  if (num_gt <= 0) return 0.0;
  std::stable_sort(scored_flags.begin(), scored_flags.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::size_t n = scored_flags.size();
  if (n == 0) return 0.0;

  std::vector<double> recall(n), precision(n);
  int tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (scored_flags[i].second) ++tp;
    recall[i] = static_cast<double>(tp) / num_gt;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  std::vector<double> suffix_max(n);
  suffix_max[n - 1] = precision[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) suffix_max[i] = std::max(precision[i], suffix_max[i + 1]);

  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    double r = k / 100.0;
    auto it = std::lower_bound(recall.begin(), recall.end(), r - 1e-12);
    if (it != recall.end()) sum += suffix_max[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / 101.0;
}

struct ClassMetrics {
  std::string name;
  double ap = 0.0;      // mean over IoU 0.50:0.05:0.95
  double ap50 = 0.0;    // at IoU 0.50
  double precision = 0.0;
  double recall = 0.0;
  std::int64_t num_gt = 0;
  std::int64_t num_det = 0;
  bool defined = true;  // false when num_gt == 0 and no detections
};

struct EvalReport {
  std::vector<ClassMetrics> per_class;  // the 7 detection classes in order
  ClassMetrics all;                     // unweighted mean over defined classes
  double conf_threshold = 0.2;
  double iou_threshold = 0.5;
};

// Ground truth grouped per frame: class_id -> boxes.
using FrameGroundTruth = std::map<int, std::vector<Box>>;

inline const std::array<double, 10>& coco_iou_grid() {
  static const std::array<double, 10> grid = {0.50, 0.55, 0.60, 0.65, 0.70,
                                              0.75, 0.80, 0.85, 0.90, 0.95};
  return grid;
}

// AP per class over the IoU grid (all predictions), P/R at the operating
// point (conf_threshold, iou_threshold). Frames keyed by frame_index; every
// prediction must reference a known frame.
inline EvalReport evaluate(const std::map<int, FrameGroundTruth>& ground_truth,
                           const std::vector<DetectionRecord>& predictions,
                           double conf_threshold = 0.2, double iou_threshold = 0.5) {
  for (const auto& d : predictions)
    if (!ground_truth.count(d.frame))
      throw ValidationError("prediction references unknown frame " + std::to_string(d.frame));

  EvalReport report;
  report.conf_threshold = conf_threshold;
  report.iou_threshold = iou_threshold;

  for (int cls = 0; cls < 7; ++cls) {
    ClassMetrics m;
    m.name = detection_class_names()[cls];

    // per-frame detections of this class in input order
    std::map<int, std::vector<ScoredBox>> dets_by_frame;
    for (const auto& d : predictions)
      if (d.class_id == cls) dets_by_frame[d.frame].push_back({d.bbox, d.confidence});

    std::map<int, std::vector<Box>> gts_by_frame;
    std::int64_t total_gt = 0;
    for (const auto& [frame, gt] : ground_truth) {
      auto it = gt.find(cls);
      if (it != gt.end() && !it->second.empty()) {
        gts_by_frame[frame] = it->second;
        total_gt += static_cast<std::int64_t>(it->second.size());
      }
    }
    m.num_gt = total_gt;
    for (const auto& [frame, dets] : dets_by_frame) m.num_det += dets.size();

    if (m.num_gt == 0 && m.num_det == 0) {
      m.defined = false;
      report.per_class.push_back(m);
      continue;
    }

    static const std::vector<Box> kNoBoxes;
    auto frame_gts = [&](int frame) -> const std::vector<Box>& {
      auto it = gts_by_frame.find(frame);
      return it == gts_by_frame.end() ? kNoBoxes : it->second;
    };

    // AP over the IoU grid, pooling per-frame match flags
    double ap_sum = 0.0;
    for (double thr : coco_iou_grid()) {
      std::vector<std::pair<double, bool>> pooled;
      for (const auto& [frame, dets] : dets_by_frame) {
        MatchResult mr = match_detections(dets, frame_gts(frame), thr);
        for (std::size_t i = 0; i < dets.size(); ++i)
          pooled.emplace_back(dets[i].confidence, mr.det_is_tp[i]);
      }
      double ap = average_precision(pooled, static_cast<int>(total_gt));
      ap_sum += ap;
      if (thr == 0.50) m.ap50 = ap;
    }
    m.ap = ap_sum / coco_iou_grid().size();

    // operating point: confidence-filtered matching at iou_threshold
    std::int64_t tp = 0, fp = 0;
    for (const auto& [frame, dets] : dets_by_frame) {
      std::vector<ScoredBox> kept;
      for (const auto& d : dets)
        if (d.confidence >= conf_threshold) kept.push_back(d);
      MatchResult mr = match_detections(kept, frame_gts(frame), iou_threshold);
      for (bool is_tp : mr.det_is_tp) (is_tp ? tp : fp)++;
    }
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    m.recall = total_gt > 0 ? static_cast<double>(tp) / total_gt : 0.0;
    report.per_class.push_back(m);
  }

  ClassMetrics all;
  all.name = "all";
  int defined = 0;
  for (const auto& m : report.per_class) {
    if (!m.defined) continue;
    ++defined;
    all.ap += m.ap;
    all.ap50 += m.ap50;
    all.precision += m.precision;
    all.recall += m.recall;
    all.num_gt += m.num_gt;
    all.num_det += m.num_det;
  }
  if (defined > 0) {
    all.ap /= defined;
    all.ap50 /= defined;
    all.precision /= defined;
    all.recall /= defined;
  } else {
    all.defined = false;
  }
  report.all = all;
  return report;
}

// Loads the test-split ground truth of a manifest and evaluates predictions
// against it.
inline EvalReport evaluate_manifest(const fs::path& manifest_path, const DatasetManifest& manifest,
                                    const std::vector<DetectionRecord>& predictions,
                                    double conf_threshold = 0.2, double iou_threshold = 0.5,
                                    const std::string& split = "test") {
  fs::path dir = fs::absolute(manifest_path).parent_path();
  std::map<int, FrameGroundTruth> gt;
  for (const auto& e : manifest.entries) {
    if (e.split != split) continue;
    FrameGroundTruth frame_gt;
    if (!e.annotation.empty()) {
      FrameAnnotation ann = load_frame_annotation(dir / e.annotation);
      for (const auto& o : ann.objects) {
        if (o.class_id >= 7) continue;
        frame_gt[o.class_id].push_back(
            Box{static_cast<double>(o.bbox.x_min), static_cast<double>(o.bbox.y_min),
                static_cast<double>(o.bbox.x_max), static_cast<double>(o.bbox.y_max)});
      }
    }
    gt[e.frame_index] = std::move(frame_gt);
  }
  if (gt.empty()) throw ValidationError("manifest has no '" + split + "' entries to evaluate");
  return evaluate(gt, predictions, conf_threshold, iou_threshold);
}

// Per-class report in the reporting layout: all first, then Body, Gown,
// Shirt, Pants, Hat, Mask, Glove; values in percent.
inline std::string format_report_text(const EvalReport& r) {
  auto cap = [](std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(s[0]));
    return s;
  };
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %8s %8s %8s %8s\n", "class", "mAP", "mAP50", "P", "R");
  out += line;
  auto row = [&](const std::string& name, const ClassMetrics& m) {
    if (m.defined) {
      std::snprintf(line, sizeof line, "%-10s %8.2f %8.2f %8.2f %8.2f\n", name.c_str(),
                    100.0 * m.ap, 100.0 * m.ap50, 100.0 * m.precision, 100.0 * m.recall);
    } else {
      std::snprintf(line, sizeof line, "%-10s %8s %8s %8s %8s\n", name.c_str(), "-", "-", "-", "-");
    }
    out += line;
  };
  row("all", r.all);
  for (const auto& m : r.per_class) row(cap(m.name), m);
  return out;
}

inline json report_to_json(const EvalReport& r) {
  json j;
  j["thresholds"] = {{"confidence", r.conf_threshold}, {"iou", r.iou_threshold}};
  auto metrics = [](const ClassMetrics& m) {
    return json{{"name", m.name},     {"mAP", m.ap},         {"mAP50", m.ap50},
                {"precision", m.precision}, {"recall", m.recall}, {"num_gt", m.num_gt},
                {"num_detections", m.num_det}, {"defined", m.defined}};
  };
  j["all"] = metrics(r.all);
  json classes = json::array();
  for (const auto& m : r.per_class) classes.push_back(metrics(m));
  j["classes"] = std::move(classes);
  return j;
}

// Seeded shuffle + contiguous split at cumulative-floor boundaries; with a
// grouping key whole groups move together (the MR per-person split).
inline DatasetManifest split_manifest(const DatasetManifest& input,
                                      const std::array<double, 3>& ratios, std::uint64_t seed,
                                      bool by_group = false) {
  if (input.entries.empty()) throw ValidationError("split: empty manifest");
  double sum = ratios[0] + ratios[1] + ratios[2];
  for (double r : ratios)
    if (r < 0.0) throw ValidationError("split: ratios must be non-negative");
  if (std::fabs(sum - 1.0) > 1e-9) throw ValidationError("split: ratios must sum to 1");

  // unit of assignment: whole groups when requested, else single entries
  std::vector<std::vector<std::size_t>> units;
  if (by_group) {
    std::map<std::string, std::size_t> unit_of;
    for (std::size_t i = 0; i < input.entries.size(); ++i) {
      std::string key = input.entries[i].group.empty()
                            ? "#" + std::to_string(input.entries[i].frame_index)
                            : input.entries[i].group;
      auto [it, inserted] = unit_of.try_emplace(key, units.size());
      if (inserted) units.emplace_back();
      units[it->second].push_back(i);
    }
  } else {
    units.resize(input.entries.size());
    for (std::size_t i = 0; i < input.entries.size(); ++i) units[i] = {i};
  }

  Rng rng(mix64(seed));
  rng.shuffle(units);

  std::size_t n = units.size();
  auto boundary = [&](double cum) {
    return static_cast<std::size_t>(std::floor(cum * static_cast<double>(n) + 1e-9));
  };
  std::size_t train_end = boundary(ratios[0]);
  std::size_t val_end = boundary(ratios[0] + ratios[1]);

  DatasetManifest out = input;
  for (std::size_t u = 0; u < n; ++u) {
    const char* tag = u < train_end ? "train" : (u < val_end ? "val" : "test");
    for (std::size_t i : units[u]) out.entries[i].split = tag;
  }
  return out;
}

inline std::array<std::size_t, 3> split_counts(const DatasetManifest& m) {
  std::array<std::size_t, 3> counts{0, 0, 0};
  for (const auto& e : m.entries) {
    if (e.split == "train") ++counts[0];
    else if (e.split == "val") ++counts[1];
    else ++counts[2];
  }
  return counts;
}

}  // namespace medsynth
