#include "msabn/hitl/finetune.hpp"

#include <memory>

#include "msabn/core/errors.hpp"
#include "msabn/harness/checkpoint.hpp"
#include "msabn/harness/evaluate.hpp"
#include "msabn/hitl/copy_replace.hpp"

namespace msabn::hitl {

std::vector<AttentionAudit> audit_model(model::MsabnNet& net, const Dataset& split, double threshold,
                                        int batch_size) {
  const auto inference = harness::infer(net, split, batch_size);
  if (inference.attention.size() != split.size()) throw ConfigError("audit needs a model with an attention branch");
  std::vector<AttentionAudit> audits;
  audits.reserve(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto& s = split[i];
    audits.push_back(audit_sample(inference.attention[i], s.bbox, s.image.width, s.image.height, threshold));
  }
  return audits;
}

std::uint64_t pairing_seed(std::uint64_t seed, int epoch) {
  return seed * 0x100000001b3ULL + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(epoch + 1);
}

FinetuneResult hitl_finetune(const model::MsabnNet& initial, const Dataset& train, const Dataset* val,
                             const FinetuneConfig& config) {
  config.schedule.validate();
  FinetuneResult result;
  {
    auto probe = model::clone_model(initial);
    result.audits = audit_model(probe, train, config.threshold);
  }
  result.pool = select_pool(result.audits, config.lambda_out, train);
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    write_audit_csv((config.out_dir / "audit.csv").string(), result.audits);
  }

  harness::FitOptions opts;
  opts.schedule = config.schedule;
  opts.seed = config.seed;

  auto current = std::make_shared<std::optional<AugmentedEpoch>>();
  const AugmentationPool pool = result.pool;
  const std::uint64_t seed = config.seed;
  harness::EpochSource augmented = [&train, pool, seed, current](int epoch) {
    current->emplace(build_augmented_epoch(train, pool, pairing_seed(seed, epoch)));
    auto epoch_ptr = current;
    return harness::EpochView{train.size(), [epoch_ptr](std::size_t i) { return (*epoch_ptr)->materialize(i); }};
  };

  auto experiment_net = model::clone_model(initial);
  if (!config.out_dir.empty()) opts.out_dir = config.out_dir / "experiment";
  result.experiment = harness::fit(experiment_net, augmented, val, opts);

  if (config.control_vanilla) {
    auto control_net = model::clone_model(initial);
    if (!config.out_dir.empty()) opts.out_dir = config.out_dir / "control";
    result.control = harness::fit(control_net, harness::plain_epochs(train), val, opts);
  }
  return result;
}

FinetuneResult hitl_finetune(const std::filesystem::path& checkpoint, const Dataset& train, const Dataset* val,
                             const FinetuneConfig& config) {
  auto [net, info] = harness::load_checkpoint(checkpoint);
  if (info.config.num_classes != train.num_classes()) {
    throw ValidationError("checkpoint has " + std::to_string(info.config.num_classes) + " classes, dataset has " +
                          std::to_string(train.num_classes()));
  }
  return hitl_finetune(net, train, val, config);
}

}  // namespace msabn::hitl
