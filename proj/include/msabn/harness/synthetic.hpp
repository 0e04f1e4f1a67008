#pragma once

#include <cstdint>
#include <string>

#include "msabn/core/dataset.hpp"

namespace msabn::harness {

/// Procedural stand-in for small object-recognition data: one class-specific shape per image,
/// drawn at a random position and scale over a tinted noise background with small distractor
/// patches. The object's bounding box is known exactly.
struct SyntheticSpec {
  int num_classes = 3;
  int per_class = 100;
  int image_size = 32;
  /// Probability that the background tint is the one assigned to the sample's class.
  /// 0 gives uninformative backgrounds; 1 makes the background a perfect shortcut.
  double background_correlation = 0.0;
  int distractors = 3;
  /// Object side as a fraction of the image side.
  double min_object = 0.35;
  double max_object = 0.6;
  std::uint64_t seed = 0;
  std::string id_prefix = "syn";
};

/// Up to 10 classes. Samples are interleaved by class.
Dataset make_synthetic_dataset(const SyntheticSpec& spec);

}  // namespace msabn::harness
