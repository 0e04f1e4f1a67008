#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "msabn/core/bbox.hpp"

namespace msabn {

/// 8-bit image stored row-major, channels interleaved (H x W x C).
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int h, int w, int c, std::uint8_t fill = 0)
      : height(h), width(w), channels(c),
        pixels(static_cast<std::size_t>(h) * w * c, fill) {}

  bool empty() const { return pixels.empty(); }
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  std::uint8_t& at(int y, int x, int c) { return pixels[index(y, x, c)]; }
  std::uint8_t at(int y, int x, int c) const { return pixels[index(y, x, c)]; }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Single-channel real-valued grid, row-major.
struct FloatMap {
  int height = 0;
  int width = 0;
  std::vector<float> values;

  FloatMap() = default;
  FloatMap(int h, int w, float fill = 0.0f)
      : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

  float& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
  float at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Bilinear resampling with half-pixel centers (corner alignment off), edge-clamped.
/// Integer outputs are rounded to nearest and saturated.
Image resize_bilinear(const Image& src, int out_h, int out_w);
FloatMap resize_bilinear(const FloatMap& src, int out_h, int out_w);

Image crop(const Image& src, const BBox& box);

Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);
std::vector<std::uint8_t> encode_png(const Image& image);

}  // namespace msabn
