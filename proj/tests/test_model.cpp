#include "torch_doctest.hpp"

#include "msabn/core/errors.hpp"
#include "msabn/model/msabn.hpp"

using namespace msabn;
using namespace msabn::model;

namespace {

ModelConfig cifar(int k = 10, bool multiscale = true) {
  ModelConfig c;
  c.backbone = BackboneKind::resnet20;
  c.num_classes = k;
  c.multiscale = multiscale;
  c.input_size = 32;
  return c;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("resnet20 pyramid at 32x32") {
    torch::NoGradGuard g;
    auto net = build_model(cifar(), 1);
    net->eval();
    const auto p = net->extract_features(torch::randn({2, 3, 32, 32}));
    CHECK((p.f1.sizes() == torch::IntArrayRef{2, 16, 32, 32}));
    CHECK((p.f2.sizes() == torch::IntArrayRef{2, 32, 16, 16}));
    CHECK((p.f3.sizes() == torch::IntArrayRef{2, 64, 8, 8}));
  }

  TEST_CASE("resnet50 pyramid at 224x224") {
    torch::NoGradGuard g;
    ModelConfig c;
    c.backbone = BackboneKind::resnet50;
    c.input_size = 224;
    auto net = build_model(c, 1);
    net->eval();
    const auto p = net->extract_features(torch::randn({1, 3, 224, 224}));
    CHECK(p.f1.size(2) == 56);
    CHECK(p.f2.size(2) == 28);
    CHECK(p.f3.size(2) == 14);
    CHECK(net->attention_side() == 56);
  }

  TEST_CASE("config validation happens at build time") {
    auto c = cifar();
    c.input_size = 30;
    CHECK_THROWS_AS(build_model(c, 0), ConfigError);
    c = cifar(1);
    CHECK_THROWS_AS(build_model(c, 0), ConfigError);
    c = cifar();
    c.attn_in_channels = 2;
    CHECK_THROWS_AS(build_model(c, 0), ConfigError);
    ModelConfig r;
    r.backbone = BackboneKind::resnet50;
    r.input_size = 100;
    CHECK_THROWS_AS(build_model(r, 0), ConfigError);
    auto net = build_model(cifar(), 0);
    CHECK_THROWS_AS(net->extract_features(torch::zeros({1, 3, 16, 16})), ConfigError);
  }

  TEST_CASE("fusion channel allocation") {
    CHECK((projection_widths(64) == std::array<int, 3>{22, 21, 21}));
    CHECK((projection_widths(65) == std::array<int, 3>{22, 22, 21}));
    CHECK((projection_widths(66) == std::array<int, 3>{22, 22, 22}));
    CHECK((projection_widths(3) == std::array<int, 3>{1, 1, 1}));
    torch::NoGradGuard g;
    auto net = build_model(cifar(), 2);
    net->eval();
    CHECK(net->attn_in_channels() == 64);
    const auto fused = net->fuse(net->extract_features(torch::randn({1, 3, 32, 32})));
    CHECK((fused.sizes() == torch::IntArrayRef{1, 64, 32, 32}));
  }

  TEST_CASE("single-scale mode passes f3 through untouched") {
    torch::NoGradGuard g;
    auto net = build_model(cifar(10, false), 3);
    net->eval();
    const auto p = net->extract_features(torch::randn({2, 3, 32, 32}));
    const auto fused = net->fuse(p);
    CHECK(fused.is_same(p.f3));
    CHECK(net->attention_side() == 8);
    auto ms = build_model(cifar(10, true), 3);
    CHECK(ms->attention_side() == 4 * net->attention_side());
  }

  TEST_CASE("attention head contract") {
    torch::NoGradGuard g;
    AttentionHead head(64, 10);
    head->eval();
    const auto out = head->forward(torch::randn({2, 64, 32, 32}) * 5);
    CHECK((out.cam.sizes() == torch::IntArrayRef{2, 10, 32, 32}));
    CHECK((out.attn_logits.sizes() == torch::IntArrayRef{2, 10}));
    CHECK((out.attention.sizes() == torch::IntArrayRef{2, 1, 32, 32}));
    CHECK((torch::allclose(out.attn_logits, out.cam.mean({2, 3}))));
    CHECK(out.attention.min().item<float>() >= 0.0f);
    CHECK(out.attention.max().item<float>() <= 1.0f);
    CHECK(torch::isfinite(out.attn_logits).all().item<bool>());
    const auto z = torch::zeros({1, 10, 4, 4});
    CHECK((torch::equal(z.mean({2, 3}), torch::zeros({1, 10}))));
  }

  TEST_CASE("mechanism identities") {
    const auto g = torch::randn({2, 64, 8, 8});
    const auto zero = torch::zeros({2, 1, 32, 32});
    const auto one = torch::ones({2, 1, 32, 32});
    CHECK(torch::equal(apply_attention(g, zero, Mechanism::residual), g));
    CHECK(torch::equal(apply_attention(g, zero, Mechanism::mul), torch::zeros_like(g)));
    CHECK(torch::equal(apply_attention(g, one, Mechanism::residual), 2 * g));
    CHECK(torch::equal(apply_attention(g, one, Mechanism::mul), g));
    // Attention is resized to g's grid and broadcast over channels.
    const auto a = torch::rand({2, 1, 32, 32});
    const auto small = torch::nn::functional::interpolate(
        a, torch::nn::functional::InterpolateFuncOptions().size(std::vector<int64_t>{8, 8}).mode(torch::kBilinear).align_corners(false));
    CHECK(torch::allclose(apply_attention(g, a, Mechanism::mul), g * small));
  }

  TEST_CASE("forward batching and determinism") {
    torch::NoGradGuard g;
    torch::set_num_threads(1);
    auto net = build_model(cifar(), 4);
    net->eval();
    const auto x = torch::randn({2, 3, 32, 32});
    const auto a = net->forward(x);
    const auto b = net->forward(x);
    CHECK((a.logits.sizes() == torch::IntArrayRef{2, 10}));
    CHECK((a.branch.attention.sizes() == torch::IntArrayRef{2, 1, 32, 32}));
    CHECK(torch::equal(a.logits, b.logits));
    CHECK(torch::equal(a.branch.cam, b.branch.cam));
    auto twin = build_model(cifar(), 4);
    twin->eval();
    CHECK(torch::equal(twin->forward(x).logits, a.logits));
    auto other = build_model(cifar(), 5);
    other->eval();
    CHECK_FALSE(torch::equal(other->forward(x).logits, a.logits));
  }

  TEST_CASE("zero image gives finite outputs") {
    torch::NoGradGuard g;
    for (auto kind : {BackboneKind::resnet20, BackboneKind::resnet50}) {
      ModelConfig c;
      c.backbone = kind;
      c.input_size = kind == BackboneKind::resnet50 ? 64 : 32;
      auto net = build_model(c, 0);
      net->eval();
      const auto out = net->forward(torch::zeros({1, 3, c.input_size, c.input_size}));
      CHECK(torch::isfinite(out.logits).all().item<bool>());
      CHECK(torch::isfinite(out.branch.cam).all().item<bool>());
    }
  }

  TEST_CASE("zero attended features with a zero-bias classifier give equal logits") {
    torch::NoGradGuard g;
    auto net = build_model(cifar(), 6);
    net->eval();
    net->classifier()->bias.zero_();
    const auto logits = net->perceive(torch::zeros({1, 64, 8, 8}));
    CHECK((logits.sizes() == torch::IntArrayRef{1, 10}));
    // Recorded constant: every logit is exactly zero.
    CHECK((torch::equal(logits, torch::zeros({1, 10}))));
  }

  TEST_CASE("plain backbone has no attention branch") {
    auto c = cifar();
    c.attention_branch = false;
    auto net = build_model(c, 1);
    CHECK_FALSE(net->has_attention_branch());
    CHECK(net->attention_branch_parameters().empty());
    torch::NoGradGuard g;
    const auto out = net->forward(torch::randn({1, 3, 32, 32}));
    CHECK_FALSE(out.branch.cam.defined());
    CHECK((out.logits.sizes() == torch::IntArrayRef{1, 10}));
  }

  TEST_CASE("clone copies weights independently") {
    auto net = build_model(cifar(), 7);
    auto copy = clone_model(net);
    net->eval();
    copy->eval();
    torch::NoGradGuard g;
    const auto x = torch::randn({1, 3, 32, 32});
    CHECK(torch::equal(net->forward(x).logits, copy->forward(x).logits));
    copy->classifier()->bias.add_(1.0);
    CHECK_FALSE(torch::equal(net->forward(x).logits, copy->forward(x).logits));
  }

  TEST_CASE("config json and names") {
    ModelConfig c = cifar(5, false);
    c.mechanism = Mechanism::mul;
    nlohmann::json j = c;
    CHECK(j.get<ModelConfig>() == c);
    CHECK(parse_backbone("resnet110") == BackboneKind::resnet110);
    CHECK_THROWS_AS(parse_backbone("vgg"), ConfigError);
    CHECK(parse_mechanism("residual") == Mechanism::residual);
  }
}
