#pragma once

#include <array>
#include <cmath>
#include <deque>
#include <vector>

#include "medsynth/image.hpp"
#include "medsynth/rng.hpp"

namespace medsynth {

// Labeled box for augmentation transforms; double-valued so affine images
// of integer boxes stay exact.
struct LabeledBox {
  int class_id = 0;
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
};

struct MosaicConfig {
  double alpha = 20.0;
  double beta = 20.0;
  int output_size = 896;

  void validate() const {
    if (alpha <= 0.0 || beta <= 0.0) throw ValidationError("mosaic: alpha and beta must be > 0");
    if (output_size < 4) throw ValidationError("mosaic: output size too small");
  }
};

struct ChromaKeyConfig {
  double dominance = 1.15;     // keyed iff G > dominance * R and G > dominance * B
  int min_green = 60;          // and G >= min_green
  double softness = 0.0;       // blend band width, pixels

  void validate() const {
    if (dominance <= 1.0) throw ValidationError("chroma key: dominance ratio must be > 1");
    if (min_green < 0 || min_green > 255) throw ValidationError("chroma key: min_green outside [0,255]");
    if (softness < 0.0) throw ValidationError("chroma key: softness must be >= 0");
  }
};

struct MosaicInput {
  Image8 image;
  std::vector<LabeledBox> boxes;
};

struct MosaicResult {
  Image8 image;
  std::vector<LabeledBox> boxes;
};

// The Beta(alpha, beta) draw behind the mosaic center, exposed for
// statistical checks. Returns normalized (cx, cy) in [0,1].
inline std::array<double, 2> mosaic_center(const MosaicConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(mix64(seed));
  double cx = rng.beta(cfg.alpha, cfg.beta);
  double cy = rng.beta(cfg.alpha, cfg.beta);
  return {cx, cy};
}

// Four images scaled into the four quadrants around a Beta-sampled center;
// boxes follow the same affine, clipped to their quadrant and dropped when
// either clipped side falls under 2 pixels.
inline MosaicResult mosaic(const std::array<MosaicInput, 4>& inputs, const MosaicConfig& cfg,
                           std::uint64_t seed) {
  cfg.validate();
  for (const auto& in : inputs)
    if (in.image.empty() || in.image.channels != 3)
      throw ValidationError("mosaic: all four inputs must be RGB images");

  auto center = mosaic_center(cfg, seed);
  int size = cfg.output_size;
  int cx = std::clamp(static_cast<int>(std::llround(center[0] * size)), 1, size - 1);
  int cy = std::clamp(static_cast<int>(std::llround(center[1] * size)), 1, size - 1);

  MosaicResult out;
  out.image = Image8(size, size, 3);

  // quadrant rects: {x0, y0, x1, y1}
  const std::array<std::array<int, 4>, 4> quads = {{{0, 0, cx, cy},
                                                    {cx, 0, size, cy},
                                                    {0, cy, cx, size},
                                                    {cx, cy, size, size}}};
  for (int q = 0; q < 4; ++q) {
    const auto& rect = quads[q];
    int qw = rect[2] - rect[0], qh = rect[3] - rect[1];
    if (qw <= 0 || qh <= 0) continue;
    const Image8& src = inputs[q].image;
    Image8 scaled = resize_bilinear(src, qw, qh);
    for (int y = 0; y < qh; ++y)
      for (int x = 0; x < qw; ++x)
        for (int c = 0; c < 3; ++c)
          out.image.at(rect[0] + x, rect[1] + y, c) = scaled.at(x, y, c);

    double sx = static_cast<double>(qw) / src.width;
    double sy = static_cast<double>(qh) / src.height;
    for (const LabeledBox& b : inputs[q].boxes) {
      LabeledBox t;
      t.class_id = b.class_id;
      t.x_min = std::max(rect[0] + b.x_min * sx, static_cast<double>(rect[0]));
      t.y_min = std::max(rect[1] + b.y_min * sy, static_cast<double>(rect[1]));
      t.x_max = std::min(rect[0] + b.x_max * sx, static_cast<double>(rect[2]));
      t.y_max = std::min(rect[1] + b.y_max * sy, static_cast<double>(rect[3]));
      if (t.x_max - t.x_min < 2.0 || t.y_max - t.y_min < 2.0) continue;
      out.boxes.push_back(t);
    }
  }
  return out;
}

// With seeded probability p, multiply every pixel's green channel by one
// uniform factor from [lo, hi]. Red and blue never change; p = 0 and
// [1, 1] are bit-exact identities.
inline Image8 green_channel_aug(const Image8& image, std::uint64_t seed, double p, double lo,
                                double hi) {
  if (lo > hi) throw ValidationError("green_channel_aug: lo > hi");
  if (p < 0.0 || p > 1.0) throw ValidationError("green_channel_aug: p outside [0,1]");
  if (image.channels != 3) throw ValidationError("green_channel_aug: RGB image required");
  Image8 out = image;
  if (p <= 0.0) return out;
  Rng rng(mix64(seed));
  if (!rng.chance(p)) return out;
  double factor = lo == hi ? lo : rng.uniform(lo, hi);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      out.at(x, y, 1) = to_u8(out.at(x, y, 1) * factor);
  return out;
}

namespace detail {

// Integer 4-neighbor distance to the keyed region (multi-source BFS).
inline std::vector<int> key_distance(const std::vector<std::uint8_t>& keyed, int w, int h) {
  constexpr int kFar = 1 << 30;
  std::vector<int> dist(keyed.size(), kFar);
  std::deque<int> queue;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (keyed[i]) {
      dist[i] = 0;
      queue.push_back(static_cast<int>(i));
    }
  }
  while (!queue.empty()) {
    int i = queue.front();
    queue.pop_front();
    int x = i % w, y = i / w;
    const int nx[4] = {x - 1, x + 1, x, x};
    const int ny[4] = {y, y, y - 1, y + 1};
    for (int k = 0; k < 4; ++k) {
      if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
      int n = ny[k] * w + nx[k];
      if (dist[n] > dist[i] + 1) {
        dist[n] = dist[i] + 1;
        queue.push_back(n);
      }
    }
  }
  return dist;
}

}  // namespace detail

// Greenscreen replacement: green-dominant pixels take the background, a
// softness-wide band blends linearly, everything else keeps the foreground.
inline Image8 chroma_composite(const Image8& foreground, const Image8& background,
                               const ChromaKeyConfig& cfg) {
  cfg.validate();
  if (foreground.empty() || foreground.channels != 3)
    throw ValidationError("chroma_composite: RGB foreground required");
  if (background.empty()) throw ValidationError("chroma_composite: empty background");
  Image8 bg = resize_bilinear(background, foreground.width, foreground.height);

  const int w = foreground.width, h = foreground.height;
  std::vector<std::uint8_t> keyed(static_cast<std::size_t>(w) * h, 0);
  bool any = false;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double r = foreground.at(x, y, 0);
      double g = foreground.at(x, y, 1);
      double b = foreground.at(x, y, 2);
      if (g > cfg.dominance * r && g > cfg.dominance * b && g >= cfg.min_green) {
        keyed[static_cast<std::size_t>(y) * w + x] = 1;
        any = true;
      }
    }
  }
  if (!any) return foreground;  // idempotent on already-composited images

  std::vector<int> dist;
  if (cfg.softness > 0.0) dist = detail::key_distance(keyed, w, h);

  Image8 out = foreground;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::size_t i = static_cast<std::size_t>(y) * w + x;
      double weight;
      if (keyed[i]) {
        weight = 1.0;
      } else if (cfg.softness > 0.0 && dist[i] <= cfg.softness) {
        weight = 1.0 - dist[i] / (cfg.softness + 1.0);
      } else {
        continue;
      }
      for (int c = 0; c < 3; ++c) {
        double fgv = foreground.at(x, y, c);
        double bgv = bg.at(x, y, c);
        out.at(x, y, c) = to_u8(weight * bgv + (1.0 - weight) * fgv);
      }
    }
  }
  return out;
}

}  // namespace medsynth
