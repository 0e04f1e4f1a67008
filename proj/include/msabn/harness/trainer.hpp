#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "msabn/core/dataset.hpp"
#include "msabn/harness/checkpoint.hpp"
#include "msabn/harness/train_config.hpp"
#include "msabn/losses/metrics.hpp"
#include "msabn/model/msabn.hpp"

namespace msabn::harness {

/// Training samples of one epoch, in canonical order; the trainer shuffles indices.
struct EpochView {
  std::size_t size = 0;
  std::function<Sample(std::size_t)> get;
};

using EpochSource = std::function<EpochView(int epoch)>;

/// Every epoch yields `dataset` unchanged. The dataset must outlive the source.
EpochSource plain_epochs(const Dataset& dataset);

struct FitOptions {
  Schedule schedule;
  std::uint64_t seed = 0;
  bool puzzle = false;
  double re_weight = 1.0;
  std::optional<std::vector<double>> class_weights;
  std::vector<Augmentation> augmentations;
  int max_steps = 0;
  /// Where metrics.jsonl, best.pt and last.pt go. Empty keeps everything in memory.
  std::filesystem::path out_dir;
};

struct FitResult {
  std::vector<EpochMetrics> metrics;
  std::vector<double> step_losses;
  std::vector<double> step_lrs;
  int steps = 0;
  int best_epoch = -1;
  double best_val_acc = -1.0;
  std::filesystem::path best_checkpoint;
  std::filesystem::path last_checkpoint;
};

/// SGD training loop. Runs single-threaded so identical seeds give identical metric streams.
/// A non-finite loss aborts with NumericError; checkpoints from earlier epochs stay on disk.
FitResult fit(model::MsabnNet& net, const EpochSource& source, const Dataset* val, const FitOptions& options);

/// Loads datasets from the config, builds a fresh model and fits it.
FitResult train(const TrainConfig& config);

/// Loads a dataset as `config` describes (path resolution, class exclusion, resizing).
Dataset load_for_model(const std::filesystem::path& path, DatasetFormat format, const model::ModelConfig& model,
                       const std::vector<std::int64_t>& exclude = {});

std::vector<EpochMetrics> read_metrics_jsonl(const std::filesystem::path& path);

}  // namespace msabn::harness
