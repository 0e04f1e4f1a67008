#pragma once

#include <array>
#include <memory>

#include <torch/torch.h>

#include "msabn/model/backbone.hpp"
#include "msabn/model/config.hpp"

namespace msabn::model {

/// Concatenates 1x1 projections of f1 and the bilinearly upsampled f2, f3 at f1's resolution.
class MultiScaleFusionImpl : public torch::nn::Module {
public:
  MultiScaleFusionImpl(std::array<int64_t, 3> block_channels, int out_channels);

  torch::Tensor forward(const FeaturePyramid& pyramid);
  const std::array<int, 3>& widths() const { return widths_; }

private:
  std::array<int, 3> widths_;
  std::array<torch::nn::Sequential, 3> projections_;
};
TORCH_MODULE(MultiScaleFusion);

/// Attention branch head outputs for a batch.
struct AttentionBranchOutput {
  torch::Tensor cam;          // B x K x h x w class response map
  torch::Tensor attn_logits;  // B x K, spatial mean of cam
  torch::Tensor attention;    // B x 1 x h x w, in [0,1]
};

/// conv3x3-BN-ReLU, conv1x1(K)-BN-ReLU; the CAM is a further 1x1 conv and the attention
/// map a logistic-squashed, batch-normalized 1-channel 1x1 conv of the same features.
class AttentionHeadImpl : public torch::nn::Module {
public:
  AttentionHeadImpl(int64_t in_channels, int64_t num_classes);

  AttentionBranchOutput forward(const torch::Tensor& fused);

private:
  torch::nn::Sequential trunk_;
  torch::nn::Conv2d cam_conv_{nullptr};
  torch::nn::Conv2d attn_conv_{nullptr};
  torch::nn::BatchNorm2d attn_bn_{nullptr};
};
TORCH_MODULE(AttentionHead);

/// Resamples `attention` (B x 1 x h x w) to g's spatial size and gates g with it.
torch::Tensor apply_attention(const torch::Tensor& g, const torch::Tensor& attention, Mechanism mechanism);

struct ForwardOutput {
  AttentionBranchOutput branch;  // tensors undefined when the model has no attention branch
  torch::Tensor logits;          // B x K perception output
};

/// Backbone + (multi-scale) attention branch + perception branch.
class MsabnNetImpl : public torch::nn::Module {
public:
  explicit MsabnNetImpl(ModelConfig config);

  ForwardOutput forward(const torch::Tensor& images);

  FeaturePyramid extract_features(const torch::Tensor& images);
  /// Fused attention-branch input. Returns f3 itself when multiscale is off.
  torch::Tensor fuse(const FeaturePyramid& pyramid);
  AttentionBranchOutput attend(const torch::Tensor& fused);
  torch::Tensor perceive(const torch::Tensor& attended);

  const ModelConfig& config() const { return config_; }
  int attn_in_channels() const { return attn_in_channels_; }
  /// Side of the attention map for the configured input size.
  int attention_side() const;
  int feature_side(int block) const;
  bool has_attention_branch() const { return static_cast<bool>(head_); }

  /// Parameters of the fusion and attention head only.
  std::vector<torch::Tensor> attention_branch_parameters() const;

  /// Module ownership of the classifier, exposed for tests that pin its bias.
  torch::nn::Linear& classifier() { return classifier_; }

private:
  ModelConfig config_;
  int attn_in_channels_ = 0;
  std::shared_ptr<Backbone> backbone_;
  MultiScaleFusion fusion_{nullptr};
  AttentionHead head_{nullptr};
  torch::nn::Linear classifier_{nullptr};
};
TORCH_MODULE(MsabnNet);

/// Builds a network with Kaiming-initialized weights drawn from torch's global generator
/// after seeding it with `seed`.
MsabnNet build_model(const ModelConfig& config, uint64_t seed);

/// Independent copy of the parameters and buffers, in the same training mode.
MsabnNet clone_model(const MsabnNet& net);

}  // namespace msabn::model
