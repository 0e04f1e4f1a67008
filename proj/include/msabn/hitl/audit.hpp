#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msabn/core/attention_map.hpp"
#include "msabn/core/bbox.hpp"
#include "msabn/core/dataset.hpp"

namespace msabn::hitl {

inline constexpr double kDefaultBinarizeThreshold = 0.2;

/// 0/1 grid, row-major.
struct BinaryMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;

  std::uint8_t at(int y, int x) const { return bits[static_cast<std::size_t>(y) * width + x]; }
};

/// Pixel is on iff value >= threshold. Threshold must lie in (0,1).
BinaryMap binarize_attention(const AttentionMap& attention, double threshold = kDefaultBinarizeThreshold);

struct AttentionSplit {
  double frac_out = 0.0;
  double frac_in = 0.0;
  long on_pixels = 0;
  long outside_pixels = 0;
  /// No pixel survived binarization; both fractions are reported as 0.
  bool empty = false;
};

/// Fraction of on-pixels lying outside `box`. The box must already be in map coordinates.
AttentionSplit split_attention(const BinaryMap& binary, const BBox& box);

inline double frac_attention_outside(const BinaryMap& binary, const BBox& box) {
  return split_attention(binary, box).frac_out;
}

struct AttentionAudit {
  SampleId sample_id;
  double frac_out = 0.0;
  long total_on_pixels = 0;
  bool selected = false;
  bool has_bbox = false;
  bool empty_attention = false;
};

/// Upsamples the attention to the image size, binarizes it and measures how much falls
/// outside the sample's box. Samples without a box get frac_out = 0.
AttentionAudit audit_sample(const AttentionMap& attention, const std::optional<BBox>& box, int image_width,
                            int image_height, double threshold = kDefaultBinarizeThreshold);

/// Split of the training set into copy-replace candidates and untouched samples.
struct AugmentationPool {
  std::vector<std::pair<SampleId, BBox>> annotated;
  std::vector<SampleId> plain;
};

/// Puts every sample with frac_out > lambda_out into the annotated pool (with its box from
/// `split`) and marks its audit as selected. Throws ValidationError listing selected ids that
/// have no box.
AugmentationPool select_pool(std::span<AttentionAudit> audits, double lambda_out, const Dataset& split);

/// CSV `sample_id,frac_out,total_on_pixels,selected`.
void write_audit_csv(const std::string& path, std::span<const AttentionAudit> audits);
std::vector<AttentionAudit> read_audit_csv(const std::string& path);

}  // namespace msabn::hitl
