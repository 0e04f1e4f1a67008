#pragma once

#include <span>

#include <torch/torch.h>

#include "msabn/core/dataset.hpp"

namespace msabn::harness {

/// Fixed input normalization: (pixel / 255 - 0.5) / 0.25, channels first. Gray images are
/// replicated to three channels.
torch::Tensor image_to_tensor(const Image& image);

/// Stacks images into B x 3 x H x W.
torch::Tensor stack_images(std::span<const Image* const> images);

torch::Tensor labels_to_tensor(std::span<const std::int64_t> labels);

}  // namespace msabn::harness
