#pragma once

#include <array>
#include <memory>

#include <torch/torch.h>

#include "msabn/model/config.hpp"

namespace msabn::model {

/// Outputs of the first three stages. Spatial sizes halve from block to block.
struct FeaturePyramid {
  torch::Tensor f1;
  torch::Tensor f2;
  torch::Tensor f3;
};

/// Residual backbone split into the part shared by both branches (`extract`) and the
/// stage the perception branch runs after attention is applied (`finish`).
///
/// New backbone families plug in by implementing this interface and extending
/// `make_backbone`; nothing else in the network depends on the concrete type.
class Backbone : public torch::nn::Module {
public:
  virtual FeaturePyramid extract(const torch::Tensor& images) = 0;
  /// Remaining stage(s) between the attended f3 and global pooling. May be the identity.
  virtual torch::Tensor finish(const torch::Tensor& attended) = 0;
  virtual std::array<int64_t, 3> block_channels() const = 0;
  virtual int64_t output_channels() const = 0;
  /// input side / f1 side.
  virtual int stem_stride() const = 0;
};

std::shared_ptr<Backbone> make_backbone(BackboneKind kind);

/// Kaiming (fan-out, ReLU gain) normal init for convolutions; unit/zero batch norm.
void init_weights(torch::nn::Module& module);

}  // namespace msabn::model
