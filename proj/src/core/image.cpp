#include "msabn/core/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "msabn/core/errors.hpp"

namespace msabn {
namespace {

// Source coordinate and blend weight along one axis, half-pixel convention.
struct Tap {
  int lo;
  int hi;
  double frac;
};

std::vector<Tap> make_taps(int in_size, int out_size) {
  std::vector<Tap> taps(out_size);
  const double scale = static_cast<double>(in_size) / out_size;
  for (int i = 0; i < out_size; ++i) {
    double src = (i + 0.5) * scale - 0.5;
    if (src < 0.0) src = 0.0;
    int lo = std::min(static_cast<int>(src), in_size - 1);
    int hi = std::min(lo + 1, in_size - 1);
    taps[i] = {lo, hi, src - lo};
  }
  return taps;
}

}  // namespace

Image resize_bilinear(const Image& src, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0) throw ValidationError("resize target must be positive");
  if (out_h == src.height && out_w == src.width) return src;
  const auto ty = make_taps(src.height, out_h);
  const auto tx = make_taps(src.width, out_w);
  Image out(out_h, out_w, src.channels);
  for (int y = 0; y < out_h; ++y) {
    const auto& [y0, y1, fy] = ty[y];
    for (int x = 0; x < out_w; ++x) {
      const auto& [x0, x1, fx] = tx[x];
      for (int c = 0; c < src.channels; ++c) {
        const double top = (1.0 - fx) * src.at(y0, x0, c) + fx * src.at(y0, x1, c);
        const double bottom = (1.0 - fx) * src.at(y1, x0, c) + fx * src.at(y1, x1, c);
        const double v = (1.0 - fy) * top + fy * bottom;
        out.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

FloatMap resize_bilinear(const FloatMap& src, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0) throw ValidationError("resize target must be positive");
  if (out_h == src.height && out_w == src.width) return src;
  const auto ty = make_taps(src.height, out_h);
  const auto tx = make_taps(src.width, out_w);
  FloatMap out(out_h, out_w);
  for (int y = 0; y < out_h; ++y) {
    const auto& [y0, y1, fy] = ty[y];
    for (int x = 0; x < out_w; ++x) {
      const auto& [x0, x1, fx] = tx[x];
      const double top = (1.0 - fx) * src.at(y0, x0) + fx * src.at(y0, x1);
      const double bottom = (1.0 - fx) * src.at(y1, x0) + fx * src.at(y1, x1);
      out.at(y, x) = static_cast<float>((1.0 - fy) * top + fy * bottom);
    }
  }
  return out;
}

Image crop(const Image& src, const BBox& box) {
  validate_bbox(box, src.width, src.height, "crop");
  Image out(box.height(), box.width(), src.channels);
  const std::size_t row_bytes = static_cast<std::size_t>(box.width()) * src.channels;
  for (int y = 0; y < box.height(); ++y) {
    std::memcpy(&out.pixels[out.index(y, 0, 0)], &src.pixels[src.index(box.y_min + y, box.x_min, 0)],
                row_bytes);
  }
  return out;
}

namespace {

png_uint_32 png_format_for(int channels) {
  switch (channels) {
    case 1: return PNG_FORMAT_GRAY;
    case 3: return PNG_FORMAT_RGB;
    case 4: return PNG_FORMAT_RGBA;
    default: throw ValidationError("unsupported channel count " + std::to_string(channels));
  }
}

png_image make_header(const Image& image) {
  png_image header;
  std::memset(&header, 0, sizeof(header));
  header.version = PNG_IMAGE_VERSION;
  header.width = static_cast<png_uint_32>(image.width);
  header.height = static_cast<png_uint_32>(image.height);
  header.format = png_format_for(image.channels);
  return header;
}

}  // namespace

Image read_png(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IngestionError("missing image file: " + path.string());
  png_image header;
  std::memset(&header, 0, sizeof(header));
  header.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&header, path.c_str())) {
    throw IngestionError("cannot read PNG " + path.string() + ": " + header.message);
  }
  // Alpha is dropped; gray stays single-channel.
  const bool gray = (header.format & PNG_FORMAT_FLAG_COLOR) == 0;
  header.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  Image image(static_cast<int>(header.height), static_cast<int>(header.width), gray ? 1 : 3);
  png_color background{0, 0, 0};
  if (!png_image_finish_read(&header, &background, image.pixels.data(), 0, nullptr)) {
    throw IngestionError("cannot decode PNG " + path.string() + ": " + header.message);
  }
  return image;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  png_image header = make_header(image);
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(header, size, 0, image.pixels.data(), 0, nullptr)) {
    throw IngestionError(std::string("PNG size query failed: ") + header.message);
  }
  std::vector<std::uint8_t> buffer(size);
  header = make_header(image);
  if (!png_image_write_to_memory(&header, buffer.data(), &size, 0, image.pixels.data(), 0, nullptr)) {
    throw IngestionError(std::string("PNG encode failed: ") + header.message);
  }
  buffer.resize(size);
  return buffer;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  png_image header = make_header(image);
  if (!png_image_write_to_file(&header, path.c_str(), 0, image.pixels.data(), 0, nullptr)) {
    throw IngestionError("cannot write PNG " + path.string() + ": " + header.message);
  }
}

}  // namespace msabn
