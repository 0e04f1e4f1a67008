#include "msabn/core/bbox.hpp"

#include <algorithm>
#include <cmath>

#include "msabn/core/errors.hpp"

namespace msabn {

std::optional<std::string> bbox_violation(const BBox& box, int image_width, int image_height) {
  if (box.x_min < 0) return "x_min: must be >= 0";
  if (box.y_min < 0) return "y_min: must be >= 0";
  if (box.x_max <= box.x_min) return "x_max: must be greater than x_min";
  if (box.y_max <= box.y_min) return "y_max: must be greater than y_min";
  if (box.x_max > image_width) return "x_max: exceeds image width " + std::to_string(image_width);
  if (box.y_max > image_height) return "y_max: exceeds image height " + std::to_string(image_height);
  return std::nullopt;
}

void validate_bbox(const BBox& box, int image_width, int image_height, const std::string& context) {
  if (auto why = bbox_violation(box, image_width, image_height)) {
    throw ValidationError("invalid bbox for " + context + ": " + *why);
  }
}

BBox scale_bbox(const BBox& box, int src_w, int src_h, int dst_w, int dst_h) {
  const double sx = static_cast<double>(dst_w) / src_w;
  const double sy = static_cast<double>(dst_h) / src_h;
  BBox out;
  out.x_min = std::clamp(static_cast<int>(std::floor(box.x_min * sx + 1e-9)), 0, dst_w - 1);
  out.y_min = std::clamp(static_cast<int>(std::floor(box.y_min * sy + 1e-9)), 0, dst_h - 1);
  out.x_max = std::clamp(static_cast<int>(std::ceil(box.x_max * sx - 1e-9)), out.x_min + 1, dst_w);
  out.y_max = std::clamp(static_cast<int>(std::ceil(box.y_max * sy - 1e-9)), out.y_min + 1, dst_h);
  return out;
}

void to_json(nlohmann::json& j, const BBox& b) {
  j = nlohmann::json{{"x_min", b.x_min}, {"y_min", b.y_min}, {"x_max", b.x_max}, {"y_max", b.y_max}};
}

void from_json(const nlohmann::json& j, BBox& b) {
  j.at("x_min").get_to(b.x_min);
  j.at("y_min").get_to(b.y_min);
  j.at("x_max").get_to(b.x_max);
  j.at("y_max").get_to(b.y_max);
}

}  // namespace msabn
