#include "msabn/model/backbone.hpp"

namespace msabn::model {
namespace nn = torch::nn;
namespace {

nn::Conv2d conv(int64_t in, int64_t out, int64_t k, int64_t stride = 1) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, k).stride(stride).padding(k / 2).bias(false));
}

class BasicBlockImpl : public nn::Module {
public:
  BasicBlockImpl(int64_t in, int64_t out, int64_t stride)
      : conv1_(register_module("conv1", conv(in, out, 3, stride))),
        bn1_(register_module("bn1", nn::BatchNorm2d(out))),
        conv2_(register_module("conv2", conv(out, out, 3))),
        bn2_(register_module("bn2", nn::BatchNorm2d(out))) {
    if (stride != 1 || in != out) {
      shortcut_ = register_module("shortcut", nn::Sequential(conv(in, out, 1, stride), nn::BatchNorm2d(out)));
    }
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto y = torch::relu(bn1_(conv1_(x)));
    y = bn2_(conv2_(y));
    return torch::relu(y + (shortcut_ ? shortcut_->forward(x) : x));
  }

private:
  nn::Conv2d conv1_;
  nn::BatchNorm2d bn1_;
  nn::Conv2d conv2_;
  nn::BatchNorm2d bn2_;
  nn::Sequential shortcut_{nullptr};
};
TORCH_MODULE(BasicBlock);

class BottleneckImpl : public nn::Module {
public:
  static constexpr int64_t kExpansion = 4;

  BottleneckImpl(int64_t in, int64_t planes, int64_t stride)
      : conv1_(register_module("conv1", conv(in, planes, 1))),
        bn1_(register_module("bn1", nn::BatchNorm2d(planes))),
        conv2_(register_module("conv2", conv(planes, planes, 3, stride))),
        bn2_(register_module("bn2", nn::BatchNorm2d(planes))),
        conv3_(register_module("conv3", conv(planes, planes * kExpansion, 1))),
        bn3_(register_module("bn3", nn::BatchNorm2d(planes * kExpansion))) {
    if (stride != 1 || in != planes * kExpansion) {
      shortcut_ = register_module(
          "shortcut", nn::Sequential(conv(in, planes * kExpansion, 1, stride), nn::BatchNorm2d(planes * kExpansion)));
    }
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto y = torch::relu(bn1_(conv1_(x)));
    y = torch::relu(bn2_(conv2_(y)));
    y = bn3_(conv3_(y));
    return torch::relu(y + (shortcut_ ? shortcut_->forward(x) : x));
  }

private:
  nn::Conv2d conv1_;
  nn::BatchNorm2d bn1_;
  nn::Conv2d conv2_;
  nn::BatchNorm2d bn2_;
  nn::Conv2d conv3_;
  nn::BatchNorm2d bn3_;
  nn::Sequential shortcut_{nullptr};
};
TORCH_MODULE(Bottleneck);

// 6n+2 layer CIFAR ResNet: 3x3 stem without downsampling, stages of width 16/32/64.
class CifarResNet : public Backbone {
public:
  explicit CifarResNet(int depth) {
    const int n = (depth - 2) / 6;
    stem_ = register_module("stem", nn::Sequential(conv(3, 16, 3), nn::BatchNorm2d(16), nn::Functional(torch::relu)));
    stage1_ = register_module("stage1", make_stage(16, 16, n, 1));
    stage2_ = register_module("stage2", make_stage(16, 32, n, 2));
    stage3_ = register_module("stage3", make_stage(32, 64, n, 2));
  }

  FeaturePyramid extract(const torch::Tensor& images) override {
    auto f1 = stage1_->forward(stem_->forward(images));
    auto f2 = stage2_->forward(f1);
    auto f3 = stage3_->forward(f2);
    return {f1, f2, f3};
  }

  torch::Tensor finish(const torch::Tensor& attended) override { return attended; }
  std::array<int64_t, 3> block_channels() const override { return {16, 32, 64}; }
  int64_t output_channels() const override { return 64; }
  int stem_stride() const override { return 1; }

private:
  static nn::Sequential make_stage(int64_t in, int64_t out, int blocks, int64_t stride) {
    nn::Sequential s;
    for (int b = 0; b < blocks; ++b) s->push_back(BasicBlock(b == 0 ? in : out, out, b == 0 ? stride : 1));
    return s;
  }

  nn::Sequential stem_{nullptr}, stage1_{nullptr}, stage2_{nullptr}, stage3_{nullptr};
};

// ImageNet ResNet-50 (stride on the 3x3 convolution). layer4 is the perception stage.
class ResNet50 : public Backbone {
public:
  ResNet50() {
    stem_ = register_module("stem", nn::Sequential(nn::Conv2d(nn::Conv2dOptions(3, 64, 7).stride(2).padding(3).bias(false)),
                                                   nn::BatchNorm2d(64), nn::Functional(torch::relu),
                                                   nn::MaxPool2d(nn::MaxPool2dOptions(3).stride(2).padding(1))));
    int64_t in = 64;
    layer1_ = register_module("layer1", make_layer(in, 64, 3, 1));
    layer2_ = register_module("layer2", make_layer(in, 128, 4, 2));
    layer3_ = register_module("layer3", make_layer(in, 256, 6, 2));
    layer4_ = register_module("layer4", make_layer(in, 512, 3, 2));
  }

  FeaturePyramid extract(const torch::Tensor& images) override {
    auto f1 = layer1_->forward(stem_->forward(images));
    auto f2 = layer2_->forward(f1);
    auto f3 = layer3_->forward(f2);
    return {f1, f2, f3};
  }

  torch::Tensor finish(const torch::Tensor& attended) override { return layer4_->forward(attended); }
  std::array<int64_t, 3> block_channels() const override { return {256, 512, 1024}; }
  int64_t output_channels() const override { return 2048; }
  int stem_stride() const override { return 4; }

private:
  static nn::Sequential make_layer(int64_t& in, int64_t planes, int blocks, int64_t stride) {
    nn::Sequential s;
    for (int b = 0; b < blocks; ++b) {
      s->push_back(Bottleneck(in, planes, b == 0 ? stride : 1));
      in = planes * BottleneckImpl::kExpansion;
    }
    return s;
  }

  nn::Sequential stem_{nullptr}, layer1_{nullptr}, layer2_{nullptr}, layer3_{nullptr}, layer4_{nullptr};
};

}  // namespace

std::shared_ptr<Backbone> make_backbone(BackboneKind kind) {
  switch (kind) {
    case BackboneKind::resnet20: return std::make_shared<CifarResNet>(20);
    case BackboneKind::resnet56: return std::make_shared<CifarResNet>(56);
    case BackboneKind::resnet110: return std::make_shared<CifarResNet>(110);
    case BackboneKind::resnet50: return std::make_shared<ResNet50>();
  }
  return nullptr;
}

void init_weights(torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  for (auto& m : module.modules(/*include_self=*/false)) {
    if (auto* c = m->as<nn::Conv2d>()) {
      nn::init::kaiming_normal_(c->weight, 0.0, torch::kFanOut, torch::kReLU);
      if (c->bias.defined()) nn::init::zeros_(c->bias);
    } else if (auto* bn = m->as<nn::BatchNorm2d>()) {
      nn::init::ones_(bn->weight);
      nn::init::zeros_(bn->bias);
    }
  }
}

}  // namespace msabn::model
