// Command-line entry point: train, evaluate, export-overlays, audit, finetune, serve,
// convert-cifar, make-synthetic.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>

#include "msabn/core/annotation.hpp"
#include "msabn/core/cifar.hpp"
#include "msabn/core/errors.hpp"
#include "msabn/harness/checkpoint.hpp"
#include "msabn/harness/evaluate.hpp"
#include "msabn/harness/export_overlays.hpp"
#include "msabn/harness/service.hpp"
#include "msabn/harness/synthetic.hpp"
#include "msabn/harness/trainer.hpp"
#include "msabn/hitl/finetune.hpp"

using namespace msabn;

namespace {

struct DataArgs {
  std::string path;
  std::string format = "folder_manifest";
  std::vector<std::int64_t> exclude;
  std::string annotations;

  void add(CLI::App* cmd, const std::string& flag = "--data") {
    cmd->add_option(flag, path, "Dataset manifest CSV or CIFAR .bin (relative paths use MSABN_DATA_ROOT)")->required();
    cmd->add_option("--format", format, "folder_manifest | cifar_binary");
    cmd->add_option("--exclude-class", exclude, "Class index to drop (labels are remapped)");
  }

  Dataset load(const model::ModelConfig& config) const {
    Dataset d = harness::load_for_model(path, parse_dataset_format(format), config, exclude);
    if (!annotations.empty()) d = apply_annotations(d, AnnotationStore(annotations).latest());
    return d;
  }
};

harness::TrainConfig build_train_config(const std::string& preset, const std::string& config_file) {
  harness::TrainConfig c = preset.empty() ? harness::TrainConfig{} : harness::preset(preset);
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) throw IngestionError("missing config file " + config_file);
    nlohmann::json j = nlohmann::json::parse(in);
    from_json(j, c);
  }
  return c;
}

harness::OverlayManifest load_manifest_arg(const std::string& path) { return harness::read_overlay_manifest(path); }

harness::AnnotationService* g_service = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-scale attention branch networks with human-in-the-loop fine-tuning"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  std::string preset, config_file, train_data, val_data, format, backbone, mechanism, out_dir;
  std::optional<int> num_classes, input_size, epochs, batch, max_steps, attn_channels;
  std::optional<double> lr, wd;
  std::optional<std::uint64_t> seed;
  std::optional<bool> multiscale, attention_branch, puzzle, class_weighted;
  std::vector<std::string> augs;
  train_cmd->add_option("--preset", preset, "cifar100 | imagenet | diagset | fine_grained | hitl_finetune | smoke");
  train_cmd->add_option("--config", config_file, "JSON file mirroring TrainConfig; flags override it");
  train_cmd->add_option("--train-data", train_data);
  train_cmd->add_option("--val-data", val_data);
  train_cmd->add_option("--format", format);
  train_cmd->add_option("--backbone", backbone);
  train_cmd->add_option("--num-classes", num_classes);
  train_cmd->add_option("--mechanism", mechanism, "mul | residual");
  train_cmd->add_option("--multiscale", multiscale, "on|off (off = single-scale attention branch)");
  train_cmd->add_option("--attention-branch", attention_branch, "on|off (off = plain backbone)");
  train_cmd->add_option("--attn-channels", attn_channels);
  train_cmd->add_option("--input-size", input_size);
  train_cmd->add_option("--epochs", epochs);
  train_cmd->add_option("--batch", batch);
  train_cmd->add_option("--lr", lr);
  train_cmd->add_option("--weight-decay", wd);
  train_cmd->add_option("--seed", seed);
  train_cmd->add_option("--puzzle", puzzle, "on|off");
  train_cmd->add_option("--class-weighted", class_weighted, "on|off");
  train_cmd->add_option("--augment", augs, "random_crop hflip vflip color_jitter gaussian_blur gaussian_noise solarize");
  train_cmd->add_option("--max-steps", max_steps);
  train_cmd->add_option("--out", out_dir);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate one or more checkpoints");
  std::vector<std::string> ckpts;
  DataArgs eval_data;
  eval_cmd->add_option("--ckpt", ckpts, "Checkpoint(s); several give mean±std")->required();
  eval_data.add(eval_cmd);

  // export-overlays
  auto* overlay_cmd = app.add_subcommand("export-overlays", "Write attention overlays and a manifest");
  std::string overlay_ckpt, overlay_out;
  double overlay_threshold = 0.2;
  DataArgs overlay_data;
  overlay_cmd->add_option("--ckpt", overlay_ckpt)->required();
  overlay_data.add(overlay_cmd);
  overlay_cmd->add_option("--annotations", overlay_data.annotations, "Annotation store whose boxes override the dataset");
  overlay_cmd->add_option("--out", overlay_out)->required();
  overlay_cmd->add_option("--threshold", overlay_threshold);

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "Measure attention outside object boxes");
  std::string audit_ckpt, audit_out = "audit.csv";
  double audit_threshold = 0.2, audit_lambda = 0.2;
  DataArgs audit_data;
  audit_cmd->add_option("--ckpt", audit_ckpt)->required();
  audit_data.add(audit_cmd);
  audit_cmd->add_option("--annotations", audit_data.annotations);
  audit_cmd->add_option("--threshold", audit_threshold, "Binarization threshold");
  audit_cmd->add_option("--lambda-out", audit_lambda, "Selection threshold on frac_out");
  audit_cmd->add_option("--out", audit_out);

  // finetune
  auto* ft_cmd = app.add_subcommand("finetune", "Copy-replace fine-tuning from a checkpoint");
  std::string ft_ckpt, ft_val, ft_out = "runs/finetune";
  harness::Schedule ft_sched{50, 16, 0.1, 0.9, 1e-4, {0.5, 0.75}};
  double ft_lambda = 0.2, ft_threshold = 0.2;
  std::uint64_t ft_seed = 0;
  bool ft_control = false;
  DataArgs ft_data;
  ft_cmd->add_option("--ckpt", ft_ckpt)->required();
  ft_data.add(ft_cmd);
  ft_cmd->add_option("--val-data", ft_val);
  ft_cmd->add_option("--annotations", ft_data.annotations);
  ft_cmd->add_option("--lambda-out", ft_lambda);
  ft_cmd->add_option("--threshold", ft_threshold);
  ft_cmd->add_option("--epochs", ft_sched.epochs);
  ft_cmd->add_option("--batch", ft_sched.batch_size);
  ft_cmd->add_option("--lr", ft_sched.base_lr);
  ft_cmd->add_option("--weight-decay", ft_sched.weight_decay);
  ft_cmd->add_option("--seed", ft_seed);
  ft_cmd->add_flag("--control-vanilla", ft_control, "Also run a vanilla retrain with the same seed");
  ft_cmd->add_option("--out", ft_out);

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Annotation HTTP service");
  std::string serve_manifest, serve_store = "annotations.jsonl", serve_host = "0.0.0.0";
  int serve_port = 8080;
  serve_cmd->add_option("--manifest", serve_manifest, "manifest.json written by export-overlays")->required();
  serve_cmd->add_option("--store", serve_store);
  serve_cmd->add_option("--host", serve_host);
  serve_cmd->add_option("--port", serve_port);

  // convert-cifar
  auto* cifar_cmd = app.add_subcommand("convert-cifar", "CIFAR binary batch -> PNGs + manifest");
  std::string cifar_in, cifar_out;
  std::optional<int> cifar_variant;
  cifar_cmd->add_option("--input", cifar_in)->required();
  cifar_cmd->add_option("--out", cifar_out)->required();
  cifar_cmd->add_option("--variant", cifar_variant, "10 or 100 (default: inferred)");

  // make-synthetic
  auto* syn_cmd = app.add_subcommand("make-synthetic", "Write a procedural dataset with known boxes");
  harness::SyntheticSpec syn;
  std::string syn_out;
  syn_cmd->add_option("--out", syn_out, "Manifest path")->required();
  syn_cmd->add_option("--classes", syn.num_classes);
  syn_cmd->add_option("--per-class", syn.per_class);
  syn_cmd->add_option("--size", syn.image_size);
  syn_cmd->add_option("--correlation", syn.background_correlation, "Background/class correlation in [0,1]");
  syn_cmd->add_option("--seed", syn.seed);
  syn_cmd->add_option("--prefix", syn.id_prefix);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      auto c = build_train_config(preset, config_file);
      if (!train_data.empty()) c.train_data = train_data;
      if (!val_data.empty()) c.val_data = val_data;
      if (!format.empty()) c.format = parse_dataset_format(format);
      if (!backbone.empty()) c.model.backbone = model::parse_backbone(backbone);
      if (!mechanism.empty()) c.model.mechanism = model::parse_mechanism(mechanism);
      if (num_classes) c.model.num_classes = *num_classes;
      if (input_size) c.model.input_size = *input_size;
      if (attn_channels) c.model.attn_in_channels = *attn_channels;
      if (multiscale) c.model.multiscale = *multiscale;
      if (attention_branch) c.model.attention_branch = *attention_branch;
      if (epochs) c.schedule.epochs = *epochs;
      if (batch) c.schedule.batch_size = *batch;
      if (lr) c.schedule.base_lr = *lr;
      if (wd) c.schedule.weight_decay = *wd;
      if (seed) c.seed = *seed;
      if (puzzle) c.puzzle = *puzzle;
      if (class_weighted) c.class_weighted = *class_weighted;
      if (max_steps) c.max_steps = *max_steps;
      if (!augs.empty()) {
        c.augmentations.clear();
        for (const auto& a : augs) c.augmentations.push_back(harness::parse_augmentation(a));
      }
      if (!out_dir.empty()) c.out_dir = out_dir;
      const auto result = harness::train(c);
      std::cout << nlohmann::json{{"best_checkpoint", result.best_checkpoint.string()},
                                  {"best_epoch", result.best_epoch},
                                  {"best_acc", result.best_val_acc},
                                  {"steps", result.steps}}
                       .dump(2)
                << '\n';
    } else if (*eval_cmd) {
      std::vector<std::filesystem::path> paths(ckpts.begin(), ckpts.end());
      const auto info = harness::load_checkpoint(paths.front()).second;
      const Dataset d = eval_data.load(info.config);
      const auto report = harness::evaluate_checkpoints(paths, d);
      nlohmann::json out{{"runs", report.runs}, {"acc", report.acc.format()}, {"bal_acc", report.bal_acc.format()}};
      std::cout << out.dump(2) << '\n';
    } else if (*overlay_cmd) {
      auto [net, info] = harness::load_checkpoint(overlay_ckpt);
      const Dataset d = overlay_data.load(info.config);
      const auto manifest = harness::export_overlays(net, d, overlay_out, overlay_threshold);
      std::cout << "wrote " << manifest.entries.size() << " overlays to " << overlay_out << '\n';
    } else if (*audit_cmd) {
      auto [net, info] = harness::load_checkpoint(audit_ckpt);
      const Dataset d = audit_data.load(info.config);
      auto audits = hitl::audit_model(net, d, audit_threshold);
      const auto pool = hitl::select_pool(audits, audit_lambda, d);
      hitl::write_audit_csv(audit_out, audits);
      std::cout << "audited " << audits.size() << " samples, " << pool.annotated.size()
                << " selected for copy-replace (lambda_out=" << audit_lambda << ")\n";
    } else if (*ft_cmd) {
      const auto info = harness::load_checkpoint(ft_ckpt).second;
      const Dataset train_set = ft_data.load(info.config);
      std::optional<Dataset> val_set;
      if (!ft_val.empty()) {
        val_set = harness::load_for_model(ft_val, parse_dataset_format(ft_data.format), info.config, ft_data.exclude);
      }
      hitl::FinetuneConfig fc;
      fc.lambda_out = ft_lambda;
      fc.threshold = ft_threshold;
      fc.schedule = ft_sched;
      fc.seed = ft_seed;
      fc.control_vanilla = ft_control;
      fc.out_dir = ft_out;
      const auto r = hitl::hitl_finetune(ft_ckpt, train_set, val_set ? &*val_set : nullptr, fc);
      nlohmann::json out{{"annotated", r.pool.annotated.size()},
                         {"plain", r.pool.plain.size()},
                         {"experiment_best_acc", r.experiment.best_val_acc},
                         {"experiment_checkpoint", r.experiment.best_checkpoint.string()}};
      if (r.control) out["control_best_acc"] = r.control->best_val_acc;
      std::cout << out.dump(2) << '\n';
    } else if (*serve_cmd) {
      AnnotationStore store(serve_store);
      harness::AnnotationService service(load_manifest_arg(serve_manifest),
                                         std::filesystem::path(serve_manifest).parent_path(), store);
      const int port = service.bind(serve_host, serve_port);
      g_service = &service;
      std::signal(SIGINT, [](int) {
        if (g_service) g_service->stop();
      });
      std::cout << "serving " << serve_manifest << " on " << serve_host << ':' << port << '\n';
      service.listen();
    } else if (*cifar_cmd) {
      std::optional<CifarVariant> variant;
      if (cifar_variant) variant = *cifar_variant == 100 ? CifarVariant::cifar100 : CifarVariant::cifar10;
      const auto n = convert_cifar(cifar_in, cifar_out, variant);
      std::cout << "converted " << n << " images into " << cifar_out << '\n';
    } else if (*syn_cmd) {
      write_manifest(harness::make_synthetic_dataset(syn), syn_out);
      std::cout << "wrote " << syn.num_classes * syn.per_class << " samples to " << syn_out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
