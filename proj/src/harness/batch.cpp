#include "msabn/harness/batch.hpp"

#include "msabn/core/errors.hpp"

namespace msabn::harness {

torch::Tensor image_to_tensor(const Image& image) {
  if (image.channels != 1 && image.channels != 3) throw ValidationError("expected a gray or RGB image");
  auto hwc = torch::from_blob(const_cast<std::uint8_t*>(image.pixels.data()), {image.height, image.width, image.channels},
                              torch::kUInt8);
  auto chw = hwc.permute({2, 0, 1}).to(torch::kFloat32).div(255.0f).sub(0.5f).div(0.25f);
  if (image.channels == 1) chw = chw.expand({3, image.height, image.width});
  return chw.contiguous();
}

torch::Tensor stack_images(std::span<const Image* const> images) {
  std::vector<torch::Tensor> items;
  items.reserve(images.size());
  for (const Image* img : images) items.push_back(image_to_tensor(*img));
  return torch::stack(items);
}

torch::Tensor labels_to_tensor(std::span<const std::int64_t> labels) {
  return torch::tensor(std::vector<int64_t>(labels.begin(), labels.end()), torch::kLong);
}

}  // namespace msabn::harness
