#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msabn/core/dataset.hpp"
#include "msabn/harness/augment.hpp"
#include "msabn/model/config.hpp"

namespace msabn::harness {

/// SGD with step decay: the learning rate is divided by 10 at each milestone, given as a
/// fraction of the total epoch count.
struct Schedule {
  int epochs = 1;
  int batch_size = 16;
  double base_lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::vector<double> milestones{0.5, 0.75};

  void validate() const;
  /// Epoch indices (0-based) at which a decay first applies: floor(fraction * epochs).
  std::vector<int> milestone_epochs() const;
  double lr_at_epoch(int epoch) const;
};

struct TrainConfig {
  std::filesystem::path train_data;
  std::filesystem::path val_data;
  DatasetFormat format = DatasetFormat::folder_manifest;
  std::vector<std::int64_t> exclude_classes;
  model::ModelConfig model;
  Schedule schedule;
  std::vector<Augmentation> augmentations;
  std::uint64_t seed = 0;
  bool puzzle = false;
  double re_weight = 1.0;
  /// Weight the cross-entropy terms by N / (K * count_k) of the training split.
  bool class_weighted = false;
  /// Stop after this many optimizer steps (0 = run every epoch).
  int max_steps = 0;
  std::filesystem::path out_dir = "runs/default";

  void validate() const;
};

void to_json(nlohmann::json& j, const Schedule& s);
void from_json(const nlohmann::json& j, Schedule& s);
void to_json(nlohmann::json& j, const TrainConfig& c);
/// Missing keys keep the values already in `c`, so a preset can be overlaid by a file.
void from_json(const nlohmann::json& j, TrainConfig& c);

/// Named experiment settings: "cifar100", "imagenet", "diagset", "fine_grained",
/// "hitl_finetune", "smoke".
TrainConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace msabn::harness
