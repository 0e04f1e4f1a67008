#include "msabn/harness/train_config.hpp"

#include <cmath>

#include "msabn/core/errors.hpp"

namespace msabn::harness {

void Schedule::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (base_lr <= 0) throw ConfigError("base_lr must be positive");
  double prev = 0.0;
  for (double m : milestones) {
    if (!(m > prev && m < 1.0)) throw ConfigError("lr milestones must be strictly increasing in (0,1)");
    prev = m;
  }
}

std::vector<int> Schedule::milestone_epochs() const {
  std::vector<int> out;
  for (double m : milestones) out.push_back(static_cast<int>(std::floor(m * epochs + 1e-9)));
  return out;
}

double Schedule::lr_at_epoch(int epoch) const {
  int passed = 0;
  for (int m : milestone_epochs()) passed += epoch >= m;
  return base_lr * std::pow(10.0, -passed);
}

void TrainConfig::validate() const {
  schedule.validate();
  model.validate();
  if (train_data.empty()) throw ConfigError("train_data is required");
  if (re_weight < 0) throw ConfigError("re_weight must be non-negative");
  if (puzzle && !model.attention_branch) throw ConfigError("the puzzle loss needs an attention branch");
}

void to_json(nlohmann::json& j, const Schedule& s) {
  j = nlohmann::json{{"epochs", s.epochs},     {"batch_size", s.batch_size},     {"base_lr", s.base_lr},
                     {"momentum", s.momentum}, {"weight_decay", s.weight_decay}, {"lr_milestones", s.milestones}};
}

void from_json(const nlohmann::json& j, Schedule& s) {
  s.epochs = j.value("epochs", s.epochs);
  s.batch_size = j.value("batch_size", s.batch_size);
  s.base_lr = j.value("base_lr", s.base_lr);
  s.momentum = j.value("momentum", s.momentum);
  s.weight_decay = j.value("weight_decay", s.weight_decay);
  s.milestones = j.value("lr_milestones", s.milestones);
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  std::vector<std::string> augs;
  for (auto a : c.augmentations) augs.push_back(to_string(a));
  j = nlohmann::json{{"train_data", c.train_data.string()},
                     {"val_data", c.val_data.string()},
                     {"format", to_string(c.format)},
                     {"exclude_classes", c.exclude_classes},
                     {"model", c.model},
                     {"optimizer", c.schedule},
                     {"augmentations", augs},
                     {"seed", c.seed},
                     {"puzzle", c.puzzle},
                     {"re_weight", c.re_weight},
                     {"class_weighted", c.class_weighted},
                     {"max_steps", c.max_steps},
                     {"out_dir", c.out_dir.string()}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  if (j.contains("train_data")) c.train_data = j.at("train_data").get<std::string>();
  if (j.contains("val_data")) c.val_data = j.at("val_data").get<std::string>();
  if (j.contains("format")) c.format = parse_dataset_format(j.at("format").get<std::string>());
  c.exclude_classes = j.value("exclude_classes", c.exclude_classes);
  if (j.contains("model")) {
    nlohmann::json merged = c.model;
    merged.update(j.at("model"));
    c.model = merged.get<model::ModelConfig>();
  }
  if (j.contains("optimizer")) from_json(j.at("optimizer"), c.schedule);
  if (j.contains("augmentations")) {
    c.augmentations.clear();
    for (const auto& a : j.at("augmentations")) c.augmentations.push_back(parse_augmentation(a.get<std::string>()));
  }
  c.seed = j.value("seed", c.seed);
  c.puzzle = j.value("puzzle", c.puzzle);
  c.re_weight = j.value("re_weight", c.re_weight);
  c.class_weighted = j.value("class_weighted", c.class_weighted);
  c.max_steps = j.value("max_steps", c.max_steps);
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
}

std::vector<std::string> preset_names() {
  return {"cifar100", "imagenet", "diagset", "fine_grained", "hitl_finetune", "smoke"};
}

TrainConfig preset(const std::string& name) {
  TrainConfig c;
  if (name == "cifar100") {
    c.format = DatasetFormat::cifar_binary;
    c.model = {model::BackboneKind::resnet20, 100, model::Mechanism::residual, true, true, 32, 0};
    c.schedule = {300, 256, 0.1, 0.9, 5e-4, {0.5, 0.75}};
    c.augmentations = {Augmentation::random_crop, Augmentation::hflip};
  } else if (name == "imagenet" || name == "diagset") {
    c.model = {model::BackboneKind::resnet50, name == "imagenet" ? 1000 : 8, model::Mechanism::residual, true, true,
               224, 0};
    c.schedule = {90, 512, 0.1, 0.9, 1e-4, {0.33, 0.66}};
    c.augmentations = {Augmentation::random_crop, Augmentation::hflip};
    if (name == "diagset") {
      c.augmentations.push_back(Augmentation::vflip);
      c.augmentations.push_back(Augmentation::color_jitter);
      c.class_weighted = true;
    }
  } else if (name == "fine_grained") {
    c.model = {model::BackboneKind::resnet50, 200, model::Mechanism::residual, true, true, 352, 0};
    c.schedule = {300, 16, 0.1, 0.9, 1e-4, {0.5, 0.75}};
    c.augmentations = {Augmentation::hflip, Augmentation::color_jitter, Augmentation::gaussian_blur,
                       Augmentation::gaussian_noise, Augmentation::solarize};
  } else if (name == "hitl_finetune") {
    c.model = {model::BackboneKind::resnet50, 200, model::Mechanism::residual, true, true, 352, 0};
    c.schedule = {50, 16, 0.1, 0.9, 1e-4, {0.5, 0.75}};
  } else if (name == "smoke") {
    c.model = {model::BackboneKind::resnet20, 3, model::Mechanism::residual, true, true, 16, 0};
    c.schedule = {1000, 16, 0.05, 0.9, 5e-4, {0.5, 0.75}};
    c.max_steps = 200;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

}  // namespace msabn::harness
