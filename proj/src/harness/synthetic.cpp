#include "msabn/harness/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "msabn/core/errors.hpp"

namespace msabn::harness {
namespace {

using Rgb = std::array<int, 3>;

// Shape masks over normalized object coordinates (u, v) in [0,1). The first few are the most
// distinct so small class counts stay easy to separate.
bool shape_mask(int shape, double u, double v) {
  const double cu = u - 0.5, cv = v - 0.5;
  const double r = std::sqrt(cu * cu + cv * cv);
  switch (shape) {
    case 0: return std::abs(cu) < 0.14 || std::abs(cv) < 0.14;
    case 1: return u < 0.22 || u > 0.78 || v < 0.22 || v > 0.78;
    case 2: return r < 0.5;
    case 3: return static_cast<int>(v * 5) % 2 == 0;
    case 4: return std::abs(cu - cv) < 0.14 || std::abs(cu + cv) < 0.14;
    case 5: return v >= 1.0 - 2.0 * std::min(u, 1.0 - u);
    case 6: return r < 0.5 && r > 0.28;
    case 7: return static_cast<int>(u * 5) % 2 == 0;
    case 8: return (static_cast<int>(u * 4) + static_cast<int>(v * 4)) % 2 == 0;
    case 9: return true;
    default: return false;
  }
}

Rgb tint_for(int index, int count) {
  // Evenly spaced hues at moderate saturation.
  const double h = 6.0 * index / count;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const int hi = 170, lo = 60;
  const int up = static_cast<int>(lo + (hi - lo) * f), down = static_cast<int>(hi - (hi - lo) * f);
  switch (sector) {
    case 0: return {hi, up, lo};
    case 1: return {down, hi, lo};
    case 2: return {lo, hi, up};
    case 3: return {lo, down, hi};
    case 4: return {up, lo, hi};
    default: return {hi, lo, down};
  }
}

std::uint8_t clamp8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

}  // namespace

Dataset make_synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.num_classes < 2 || spec.num_classes > 10) throw ConfigError("synthetic data supports 2..10 classes");
  if (spec.per_class < 1 || spec.image_size < 8) throw ConfigError("synthetic data needs per_class >= 1, size >= 8");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 18.0);
  const int n = spec.image_size;

  std::vector<Sample> samples;
  for (int i = 0; i < spec.per_class; ++i) {
    for (int label = 0; label < spec.num_classes; ++label) {
      Sample s;
      s.id = spec.id_prefix + "_" + std::to_string(samples.size());
      s.label = label;
      s.image = Image(n, n, 3);

      const int bg_class = unit(rng) < spec.background_correlation
                               ? label
                               : static_cast<int>(unit(rng) * spec.num_classes) % spec.num_classes;
      const Rgb bg = tint_for(bg_class, spec.num_classes);
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
          const int jitter = static_cast<int>(noise(rng));
          for (int c = 0; c < 3; ++c) s.image.at(y, x, c) = clamp8(bg[c] + jitter);
        }
      }

      for (int d = 0; d < spec.distractors; ++d) {
        const int side = 2 + static_cast<int>(unit(rng) * std::max(2, n / 10));
        const int x0 = static_cast<int>(unit(rng) * (n - side)), y0 = static_cast<int>(unit(rng) * (n - side));
        const Rgb color{static_cast<int>(unit(rng) * 255), static_cast<int>(unit(rng) * 255),
                        static_cast<int>(unit(rng) * 255)};
        for (int y = y0; y < y0 + side; ++y) {
          for (int x = x0; x < x0 + side; ++x) {
            for (int c = 0; c < 3; ++c) s.image.at(y, x, c) = clamp8(color[c]);
          }
        }
      }

      const double frac = spec.min_object + (spec.max_object - spec.min_object) * unit(rng);
      const int side = std::clamp(static_cast<int>(std::lround(frac * n)), 4, n);
      const int x0 = static_cast<int>(unit(rng) * (n - side + 1)), y0 = static_cast<int>(unit(rng) * (n - side + 1));
      const int bright = 200 + static_cast<int>(unit(rng) * 55);
      const Rgb fg = unit(rng) < 0.5 ? Rgb{bright, bright, bright} : Rgb{20, 20, 20};
      for (int y = y0; y < y0 + side; ++y) {
        for (int x = x0; x < x0 + side; ++x) {
          const double u = (x - x0 + 0.5) / side, v = (y - y0 + 0.5) / side;
          if (!shape_mask(label, u, v)) continue;
          for (int c = 0; c < 3; ++c) s.image.at(y, x, c) = clamp8(fg[c] + static_cast<int>(noise(rng) * 0.3));
        }
      }
      s.bbox = BBox{x0, y0, x0 + side, y0 + side};
      samples.push_back(std::move(s));
    }
  }
  return Dataset::from_samples(std::move(samples), spec.num_classes);
}

}  // namespace msabn::harness
