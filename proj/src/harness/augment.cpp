#include "msabn/harness/augment.hpp"

#include <algorithm>
#include <cmath>

#include "msabn/core/errors.hpp"

namespace msabn::harness {
namespace {

std::uint8_t saturate(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

Image color_jitter(const Image& image, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> factor(0.8, 1.2);
  const double brightness = factor(rng);
  const double contrast = factor(rng);
  double mean = 0.0;
  for (auto p : image.pixels) mean += p;
  mean /= std::max<std::size_t>(1, image.pixels.size());
  Image out = image;
  for (auto& p : out.pixels) p = saturate(((p - mean) * contrast + mean) * brightness);
  return out;
}

Image gaussian_blur(const Image& image) {
  static constexpr double kKernel[3] = {0.25, 0.5, 0.25};
  Image tmp = image, out = image;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < image.channels; ++c) {
        double acc = 0.0;
        for (int d = -1; d <= 1; ++d) acc += kKernel[d + 1] * image.at(y, std::clamp(x + d, 0, image.width - 1), c);
        tmp.at(y, x, c) = saturate(acc);
      }
    }
  }
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < image.channels; ++c) {
        double acc = 0.0;
        for (int d = -1; d <= 1; ++d) acc += kKernel[d + 1] * tmp.at(std::clamp(y + d, 0, image.height - 1), x, c);
        out.at(y, x, c) = saturate(acc);
      }
    }
  }
  return out;
}

Image gaussian_noise(const Image& image, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 8.0);
  Image out = image;
  for (auto& p : out.pixels) p = saturate(p + noise(rng));
  return out;
}

Image solarize(const Image& image) {
  Image out = image;
  for (auto& p : out.pixels) {
    if (p >= 128) p = static_cast<std::uint8_t>(255 - p);
  }
  return out;
}

}  // namespace

Augmentation parse_augmentation(const std::string& name) {
  if (name == "random_crop") return Augmentation::random_crop;
  if (name == "hflip") return Augmentation::hflip;
  if (name == "vflip") return Augmentation::vflip;
  if (name == "color_jitter") return Augmentation::color_jitter;
  if (name == "gaussian_blur") return Augmentation::gaussian_blur;
  if (name == "gaussian_noise") return Augmentation::gaussian_noise;
  if (name == "solarize") return Augmentation::solarize;
  throw ConfigError("unknown augmentation '" + name + "'");
}

std::string to_string(Augmentation a) {
  switch (a) {
    case Augmentation::random_crop: return "random_crop";
    case Augmentation::hflip: return "hflip";
    case Augmentation::vflip: return "vflip";
    case Augmentation::color_jitter: return "color_jitter";
    case Augmentation::gaussian_blur: return "gaussian_blur";
    case Augmentation::gaussian_noise: return "gaussian_noise";
    case Augmentation::solarize: return "solarize";
  }
  return "?";
}

Image hflip(const Image& image) {
  Image out = image;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < image.channels; ++c) out.at(y, x, c) = image.at(y, image.width - 1 - x, c);
    }
  }
  return out;
}

Image vflip(const Image& image) {
  Image out = image;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < image.channels; ++c) out.at(y, x, c) = image.at(image.height - 1 - y, x, c);
    }
  }
  return out;
}

Image random_crop(const Image& image, int pad, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> offset(-pad, pad);
  const int dy = offset(rng), dx = offset(rng);
  Image out(image.height, image.width, image.channels, 0);
  for (int y = 0; y < image.height; ++y) {
    const int sy = y + dy;
    if (sy < 0 || sy >= image.height) continue;
    for (int x = 0; x < image.width; ++x) {
      const int sx = x + dx;
      if (sx < 0 || sx >= image.width) continue;
      for (int c = 0; c < image.channels; ++c) out.at(y, x, c) = image.at(sy, sx, c);
    }
  }
  return out;
}

Image augment(const Image& image, const std::vector<Augmentation>& ops, std::mt19937_64& rng) {
  Image out = image;
  std::bernoulli_distribution coin(0.5);
  for (auto op : ops) {
    switch (op) {
      case Augmentation::random_crop: out = random_crop(out, std::max(1, out.width / 8), rng); break;
      case Augmentation::hflip: if (coin(rng)) out = hflip(out); break;
      case Augmentation::vflip: if (coin(rng)) out = vflip(out); break;
      case Augmentation::color_jitter: if (coin(rng)) out = color_jitter(out, rng); break;
      case Augmentation::gaussian_blur: if (coin(rng)) out = gaussian_blur(out); break;
      case Augmentation::gaussian_noise: if (coin(rng)) out = gaussian_noise(out, rng); break;
      case Augmentation::solarize: if (coin(rng)) out = solarize(out); break;
    }
  }
  return out;
}

}  // namespace msabn::harness
