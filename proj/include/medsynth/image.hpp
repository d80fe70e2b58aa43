#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "medsynth/error.hpp"

namespace medsynth {

// Interleaved 8-bit raster (1 or 3 channels).
struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  Image8() = default;
  Image8(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, fill) {}

  bool empty() const { return data.empty(); }

  std::uint8_t& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  void set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    std::size_t i = (static_cast<std::size_t>(y) * width + x) * channels;
    data[i] = r;
    data[i + 1] = g;
    data[i + 2] = b;
  }

  bool operator==(const Image8& o) const {
    return width == o.width && height == o.height && channels == o.channels && data == o.data;
  }
};

struct Image16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;

  Image16() = default;
  Image16(int w, int h, std::uint16_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::uint16_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint16_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

inline std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::llround(v), 0ll, 255ll));
}

// Bilinear sample at normalized (u, v) in [0,1], clamped at the border.
// Returns per-channel values in [0,255].
inline std::array<double, 3> sample_bilinear(const Image8& img, double u, double v) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  if (img.empty()) return out;
  double x = std::clamp(u, 0.0, 1.0) * img.width - 0.5;
  double y = std::clamp(v, 0.0, 1.0) * img.height - 0.5;
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  double fx = x - x0;
  double fy = y - y0;
  int x1 = std::clamp(x0 + 1, 0, img.width - 1);
  int y1 = std::clamp(y0 + 1, 0, img.height - 1);
  x0 = std::clamp(x0, 0, img.width - 1);
  y0 = std::clamp(y0, 0, img.height - 1);
  for (int c = 0; c < std::min(img.channels, 3); ++c) {
    double v00 = img.at(x0, y0, c);
    double v10 = img.at(x1, y0, c);
    double v01 = img.at(x0, y1, c);
    double v11 = img.at(x1, y1, c);
    out[c] = (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 + (1 - fx) * fy * v01 + fx * fy * v11;
  }
  if (img.channels == 1) out[1] = out[2] = out[0];
  return out;
}

inline Image8 resize_bilinear(const Image8& src, int w, int h) {
  if (src.empty()) throw ValidationError("resize_bilinear: empty source image");
  if (src.width == w && src.height == h) return src;
  Image8 dst(w, h, src.channels);
  for (int y = 0; y < h; ++y) {
    double v = (y + 0.5) / h;
    for (int x = 0; x < w; ++x) {
      double u = (x + 0.5) / w;
      auto s = sample_bilinear(src, u, v);
      for (int c = 0; c < src.channels; ++c) dst.at(x, y, c) = to_u8(s[c]);
    }
  }
  return dst;
}

// h in [0,360), s and v in [0,1]
struct Hsv {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

inline Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
  double mx = std::max({r, g, b});
  double mn = std::min({r, g, b});
  double d = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? d / mx : 0.0;
  if (d > 0.0) {
    if (mx == r)
      out.h = 60.0 * std::fmod((g - b) / d + 6.0, 6.0);
    else if (mx == g)
      out.h = 60.0 * ((b - r) / d + 2.0);
    else
      out.h = 60.0 * ((r - g) / d + 4.0);
  }
  return out;
}

inline std::array<std::uint8_t, 3> hsv_to_rgb(double h, double s, double v) {
  h = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0);
  s = std::clamp(s, 0.0, 1.0);
  v = std::clamp(v, 0.0, 1.0);
  double c = v * s;
  double hp = h / 60.0;
  double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1)      { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else             { r = c; b = x; }
  double m = v - c;
  return {to_u8((r + m) * 255.0), to_u8((g + m) * 255.0), to_u8((b + m) * 255.0)};
}

}  // namespace medsynth
