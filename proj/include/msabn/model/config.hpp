#pragma once

#include <array>
#include <string>

#include <json.hpp>

namespace msabn::model {

enum class BackboneKind { resnet20, resnet56, resnet110, resnet50 };

/// How attention gates the feature extractor output g: `mul` is g*A, `residual` is g*(1+A).
enum class Mechanism { mul, residual };

struct ModelConfig {
  BackboneKind backbone = BackboneKind::resnet20;
  int num_classes = 10;
  Mechanism mechanism = Mechanism::residual;
  /// false gives the single-scale attention branch fed by the third block only.
  bool multiscale = true;
  /// false drops the attention branch entirely (plain backbone classifier).
  bool attention_branch = true;
  int input_size = 32;
  /// Channels entering the attention head; 0 picks min(C3, 256).
  int attn_in_channels = 0;

  /// Throws ConfigError. Called by the network constructor.
  void validate() const;
  /// Input side length must be a multiple of this.
  int size_multiple() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

BackboneKind parse_backbone(const std::string& name);
std::string to_string(BackboneKind kind);
Mechanism parse_mechanism(const std::string& name);
std::string to_string(Mechanism mechanism);

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

/// Widths of the three 1x1 projections that make up `total` fused channels:
/// floor(total/3) each, remainder to the first block, then the second.
std::array<int, 3> projection_widths(int total);

}  // namespace msabn::model
