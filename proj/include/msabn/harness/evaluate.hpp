#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "msabn/core/attention_map.hpp"
#include "msabn/core/dataset.hpp"
#include "msabn/losses/losses.hpp"
#include "msabn/losses/metrics.hpp"
#include "msabn/model/msabn.hpp"

namespace msabn::harness {

/// Eval-mode predictions and attention maps (empty when the model has no attention branch).
struct Inference {
  std::vector<std::int64_t> predictions;
  std::vector<AttentionMap> attention;
};

Inference infer(model::MsabnNet& net, const Dataset& dataset, int batch_size = 64);

struct EvalReport {
  double acc = 0.0;
  double bal_acc = 0.0;
  std::vector<std::optional<double>> per_class_recall;
  std::vector<std::int64_t> predictions;
  losses::LossReport loss;
};

void to_json(nlohmann::json& j, const EvalReport& r);

/// Eval-mode metrics plus unweighted losses. Throws ValidationError on a class-count mismatch.
EvalReport evaluate(model::MsabnNet& net, const Dataset& dataset, int batch_size = 64);
EvalReport evaluate_checkpoint(const std::filesystem::path& ckpt, const Dataset& dataset, int batch_size = 64);

/// Per-run reports plus mean (and, for several runs, sample std) accuracy.
struct MultiRunReport {
  std::vector<EvalReport> runs;
  MeanStd acc;
  MeanStd bal_acc;
};

MultiRunReport evaluate_checkpoints(const std::vector<std::filesystem::path>& ckpts, const Dataset& dataset,
                                    int batch_size = 64);

}  // namespace msabn::harness
