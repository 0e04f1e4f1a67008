#include "msabn/model/config.hpp"

#include "msabn/core/errors.hpp"

namespace msabn::model {

int ModelConfig::size_multiple() const { return backbone == BackboneKind::resnet50 ? 16 : 4; }

void ModelConfig::validate() const {
  if (num_classes < 2) throw ConfigError("num_classes must be at least 2");
  if (input_size <= 0 || input_size % size_multiple() != 0) {
    throw ConfigError("input_size " + std::to_string(input_size) + " must be a positive multiple of " +
                      std::to_string(size_multiple()) + " for " + to_string(backbone));
  }
  if (attn_in_channels != 0 && attn_in_channels < 3) {
    throw ConfigError("attn_in_channels must be at least 3 (one per fused block)");
  }
}

BackboneKind parse_backbone(const std::string& name) {
  if (name == "resnet20") return BackboneKind::resnet20;
  if (name == "resnet56") return BackboneKind::resnet56;
  if (name == "resnet110") return BackboneKind::resnet110;
  if (name == "resnet50") return BackboneKind::resnet50;
  throw ConfigError("unknown backbone '" + name + "'");
}

std::string to_string(BackboneKind kind) {
  switch (kind) {
    case BackboneKind::resnet20: return "resnet20";
    case BackboneKind::resnet56: return "resnet56";
    case BackboneKind::resnet110: return "resnet110";
    case BackboneKind::resnet50: return "resnet50";
  }
  return "?";
}

Mechanism parse_mechanism(const std::string& name) {
  if (name == "mul") return Mechanism::mul;
  if (name == "residual") return Mechanism::residual;
  throw ConfigError("unknown attention mechanism '" + name + "'");
}

std::string to_string(Mechanism mechanism) { return mechanism == Mechanism::mul ? "mul" : "residual"; }

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"backbone", to_string(c.backbone)},
                     {"num_classes", c.num_classes},
                     {"mechanism", to_string(c.mechanism)},
                     {"multiscale", c.multiscale},
                     {"attention_branch", c.attention_branch},
                     {"input_size", c.input_size},
                     {"attn_in_channels", c.attn_in_channels}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  ModelConfig d;
  c.backbone = parse_backbone(j.value("backbone", to_string(d.backbone)));
  c.num_classes = j.value("num_classes", d.num_classes);
  c.mechanism = parse_mechanism(j.value("mechanism", to_string(d.mechanism)));
  c.multiscale = j.value("multiscale", d.multiscale);
  c.attention_branch = j.value("attention_branch", d.attention_branch);
  c.input_size = j.value("input_size", d.input_size);
  c.attn_in_channels = j.value("attn_in_channels", d.attn_in_channels);
}

std::array<int, 3> projection_widths(int total) {
  if (total < 3) throw ConfigError("need at least 3 fused channels");
  const int base = total / 3;
  const int rem = total % 3;
  return {base + (rem >= 1 ? 1 : 0), base + (rem >= 2 ? 1 : 0), base};
}

}  // namespace msabn::model
