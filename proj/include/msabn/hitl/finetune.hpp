#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "msabn/core/dataset.hpp"
#include "msabn/harness/trainer.hpp"
#include "msabn/hitl/audit.hpp"
#include "msabn/model/msabn.hpp"

namespace msabn::hitl {

/// Attention audit of every sample in `split` against its box, from an eval-mode forward.
std::vector<AttentionAudit> audit_model(model::MsabnNet& net, const Dataset& split,
                                        double threshold = kDefaultBinarizeThreshold, int batch_size = 64);

struct FinetuneConfig {
  double lambda_out = 0.2;
  double threshold = kDefaultBinarizeThreshold;
  harness::Schedule schedule{50, 16, 0.1, 0.9, 1e-4, {0.5, 0.75}};
  std::uint64_t seed = 0;
  /// Also retrain a copy of the same checkpoint without copy-replace, same seed.
  bool control_vanilla = false;
  /// experiment/ and control/ run directories plus audit.csv. Empty keeps results in memory.
  std::filesystem::path out_dir;
};

struct FinetuneResult {
  std::vector<AttentionAudit> audits;
  AugmentationPool pool;
  harness::FitResult experiment;
  std::optional<harness::FitResult> control;
};

/// Audit -> pool selection -> copy-replace fine-tuning of `initial` (left untouched; the
/// runs train copies). `train` must already carry the boxes to use (see apply_annotations).
FinetuneResult hitl_finetune(const model::MsabnNet& initial, const Dataset& train, const Dataset* val,
                             const FinetuneConfig& config);

FinetuneResult hitl_finetune(const std::filesystem::path& checkpoint, const Dataset& train, const Dataset* val,
                             const FinetuneConfig& config);

/// Seed used for the pairing draw of a given epoch.
std::uint64_t pairing_seed(std::uint64_t seed, int epoch);

}  // namespace msabn::hitl
