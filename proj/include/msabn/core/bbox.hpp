#pragma once

#include <optional>
#include <string>

#include <json.hpp>

namespace msabn {

/// Axis-aligned box in pixel coordinates, half-open: [x_min, x_max) x [y_min, y_max).
struct BBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const { return x_max - x_min; }
  int height() const { return y_max - y_min; }
  long area() const { return static_cast<long>(width()) * height(); }
  bool contains(int x, int y) const { return x >= x_min && x < x_max && y >= y_min && y < y_max; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Returns the first violated invariant as "field: message", or nothing when the box
/// fits an image of the given size.
std::optional<std::string> bbox_violation(const BBox& box, int image_width, int image_height);

/// Throws ValidationError mentioning `context` when the box is invalid.
void validate_bbox(const BBox& box, int image_width, int image_height, const std::string& context);

/// Maps a box from an image of size (src_w, src_h) onto a grid of size (dst_w, dst_h).
/// The result is rounded outward and clamped, so it always keeps at least one cell.
BBox scale_bbox(const BBox& box, int src_w, int src_h, int dst_w, int dst_h);

void to_json(nlohmann::json& j, const BBox& b);
void from_json(const nlohmann::json& j, BBox& b);

}  // namespace msabn
