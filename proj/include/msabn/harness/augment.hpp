#pragma once

#include <random>
#include <string>
#include <vector>

#include "msabn/core/image.hpp"

namespace msabn::harness {

/// Names accepted in TrainConfig::augmentations.
enum class Augmentation { random_crop, hflip, vflip, color_jitter, gaussian_blur, gaussian_noise, solarize };

Augmentation parse_augmentation(const std::string& name);
std::string to_string(Augmentation a);

/// Applies each augmentation in order, each with its own coin flip where applicable.
Image augment(const Image& image, const std::vector<Augmentation>& ops, std::mt19937_64& rng);

Image hflip(const Image& image);
Image vflip(const Image& image);
/// Zero-pads by `pad` pixels on each side and crops back at a random offset.
Image random_crop(const Image& image, int pad, std::mt19937_64& rng);

}  // namespace msabn::harness
