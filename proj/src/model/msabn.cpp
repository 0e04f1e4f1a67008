#include "msabn/model/msabn.hpp"

#include "msabn/core/errors.hpp"

namespace msabn::model {
namespace nn = torch::nn;
namespace F = torch::nn::functional;

namespace {

torch::Tensor resize_to(const torch::Tensor& x, int64_t h, int64_t w) {
  if (x.size(2) == h && x.size(3) == w) return x;
  return F::interpolate(x, F::InterpolateFuncOptions()
                               .size(std::vector<int64_t>{h, w})
                               .mode(torch::kBilinear)
                               .align_corners(false));
}

}  // namespace

MultiScaleFusionImpl::MultiScaleFusionImpl(std::array<int64_t, 3> block_channels, int out_channels)
    : widths_(projection_widths(out_channels)) {
  for (int i = 0; i < 3; ++i) {
    projections_[i] = register_module(
        "proj" + std::to_string(i + 1),
        nn::Sequential(nn::Conv2d(nn::Conv2dOptions(block_channels[i], widths_[i], 1).bias(false)),
                       nn::BatchNorm2d(widths_[i]), nn::Functional(torch::relu)));
  }
}

torch::Tensor MultiScaleFusionImpl::forward(const FeaturePyramid& p) {
  const int64_t h = p.f1.size(2), w = p.f1.size(3);
  return torch::cat({projections_[0]->forward(p.f1), projections_[1]->forward(resize_to(p.f2, h, w)),
                     projections_[2]->forward(resize_to(p.f3, h, w))},
                    1);
}

AttentionHeadImpl::AttentionHeadImpl(int64_t in_channels, int64_t num_classes) {
  trunk_ = register_module(
      "trunk", nn::Sequential(nn::Conv2d(nn::Conv2dOptions(in_channels, in_channels, 3).padding(1).bias(false)),
                              nn::BatchNorm2d(in_channels), nn::Functional(torch::relu),
                              nn::Conv2d(nn::Conv2dOptions(in_channels, num_classes, 1).bias(false)),
                              nn::BatchNorm2d(num_classes), nn::Functional(torch::relu)));
  cam_conv_ = register_module("cam_conv", nn::Conv2d(nn::Conv2dOptions(num_classes, num_classes, 1).bias(false)));
  attn_conv_ = register_module("attn_conv", nn::Conv2d(nn::Conv2dOptions(num_classes, 1, 1).bias(false)));
  attn_bn_ = register_module("attn_bn", nn::BatchNorm2d(1));
}

AttentionBranchOutput AttentionHeadImpl::forward(const torch::Tensor& fused) {
  auto features = trunk_->forward(fused);
  AttentionBranchOutput out;
  out.cam = cam_conv_(features);
  out.attn_logits = out.cam.mean({2, 3});
  out.attention = torch::sigmoid(attn_bn_(attn_conv_(features)));
  return out;
}

torch::Tensor apply_attention(const torch::Tensor& g, const torch::Tensor& attention, Mechanism mechanism) {
  const auto a = resize_to(attention, g.size(2), g.size(3));
  return mechanism == Mechanism::mul ? g * a : g * (1 + a);
}

MsabnNetImpl::MsabnNetImpl(ModelConfig config) : config_(config) {
  config_.validate();
  backbone_ = register_module("backbone", make_backbone(config_.backbone));
  const auto channels = backbone_->block_channels();
  if (config_.attention_branch) {
    if (config_.multiscale) {
      attn_in_channels_ = config_.attn_in_channels ? config_.attn_in_channels
                                                   : static_cast<int>(std::min<int64_t>(channels[2], 256));
      fusion_ = register_module("fusion", MultiScaleFusion(channels, attn_in_channels_));
    } else {
      attn_in_channels_ = static_cast<int>(channels[2]);
    }
    head_ = register_module("attention_head", AttentionHead(attn_in_channels_, config_.num_classes));
  }
  classifier_ = register_module("classifier", nn::Linear(backbone_->output_channels(), config_.num_classes));
  init_weights(*this);
}

FeaturePyramid MsabnNetImpl::extract_features(const torch::Tensor& images) {
  if (images.dim() != 4 || images.size(2) != config_.input_size || images.size(3) != config_.input_size) {
    throw ConfigError("expected B x C x " + std::to_string(config_.input_size) + " x " +
                      std::to_string(config_.input_size) + " input");
  }
  return backbone_->extract(images);
}

torch::Tensor MsabnNetImpl::fuse(const FeaturePyramid& pyramid) {
  return fusion_ ? fusion_->forward(pyramid) : pyramid.f3;
}

AttentionBranchOutput MsabnNetImpl::attend(const torch::Tensor& fused) {
  if (!head_) throw ConfigError("model was built without an attention branch");
  return head_->forward(fused);
}

torch::Tensor MsabnNetImpl::perceive(const torch::Tensor& attended) {
  auto x = backbone_->finish(attended);
  return classifier_(x.mean({2, 3}));
}

ForwardOutput MsabnNetImpl::forward(const torch::Tensor& images) {
  // The shape check in extract_features is skipped for tiles, which are half-size.
  const FeaturePyramid p = backbone_->extract(images);
  ForwardOutput out;
  if (!head_) {
    out.logits = perceive(p.f3);
    return out;
  }
  out.branch = head_->forward(fuse(p));
  out.logits = perceive(apply_attention(p.f3, out.branch.attention, config_.mechanism));
  return out;
}

int MsabnNetImpl::feature_side(int block) const {
  const int f1 = config_.input_size / backbone_->stem_stride();
  return f1 >> (block - 1);
}

int MsabnNetImpl::attention_side() const { return feature_side(config_.multiscale ? 1 : 3); }

std::vector<torch::Tensor> MsabnNetImpl::attention_branch_parameters() const {
  std::vector<torch::Tensor> params;
  if (fusion_) {
    for (auto& t : fusion_->parameters()) params.push_back(t);
  }
  if (head_) {
    for (auto& t : head_->parameters()) params.push_back(t);
  }
  return params;
}

MsabnNet build_model(const ModelConfig& config, uint64_t seed) {
  torch::manual_seed(seed);
  return MsabnNet(config);
}

MsabnNet clone_model(const MsabnNet& net) {
  MsabnNet copy(net->config());
  torch::NoGradGuard no_grad;
  auto src_params = net->named_parameters();
  for (auto& item : copy->named_parameters()) item.value().copy_(src_params[item.key()]);
  auto src_buffers = net->named_buffers();
  for (auto& item : copy->named_buffers()) item.value().copy_(src_buffers[item.key()]);
  copy->train(net->is_training());
  return copy;
}

}  // namespace msabn::model
