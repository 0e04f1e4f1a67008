#include "msabn/harness/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "msabn/core/errors.hpp"
#include "msabn/harness/batch.hpp"
#include "msabn/harness/evaluate.hpp"
#include "msabn/losses/losses.hpp"
#include "msabn/puzzle/puzzle.hpp"

namespace msabn::harness {

EpochSource plain_epochs(const Dataset& dataset) {
  return [&dataset](int) { return EpochView{dataset.size(), [&dataset](std::size_t i) { return dataset[i]; }}; };
}

namespace {

void set_lr(torch::optim::SGD& opt, double lr) {
  for (auto& group : opt.param_groups()) static_cast<torch::optim::SGDOptions&>(group.options()).lr(lr);
}

struct Running {
  double l_attn = 0, l_cls = 0, l_re = 0;
  std::vector<std::int64_t> preds, labels;
  std::size_t n = 0;
};

}  // namespace

FitResult fit(model::MsabnNet& net, const EpochSource& source, const Dataset* val, const FitOptions& options) {
  options.schedule.validate();
  if (options.puzzle && !net->has_attention_branch()) throw ConfigError("the puzzle loss needs an attention branch");
  torch::set_num_threads(1);
  torch::manual_seed(options.seed);

  const auto& sched = options.schedule;
  torch::optim::SGD opt(net->parameters(), torch::optim::SGDOptions(sched.base_lr)
                                               .momentum(sched.momentum)
                                               .weight_decay(sched.weight_decay));
  std::optional<torch::Tensor> weights;
  if (options.class_weights) weights = torch::tensor(*options.class_weights, torch::kFloat32);

  std::mt19937_64 order_rng(options.seed);
  std::mt19937_64 aug_rng(options.seed ^ 0x9e3779b97f4a7c15ULL);

  std::ofstream metrics_out;
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    metrics_out.open(options.out_dir / "metrics.jsonl", std::ios::trunc);
  }

  FitResult result;
  CheckpointInfo info{net->config(), 0, nlohmann::json::object(), options.seed};
  bool stop = false;
  for (int epoch = 0; epoch < sched.epochs && !stop; ++epoch) {
    const double lr = sched.lr_at_epoch(epoch);
    set_lr(opt, lr);
    net->train();

    const EpochView view = source(epoch);
    if (view.size == 0) throw ValidationError("empty training split");
    std::vector<std::size_t> order(view.size);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), order_rng);

    Running run;
    std::vector<Image> images;
    std::vector<const Image*> image_ptrs;
    std::vector<std::int64_t> labels;
    for (std::size_t start = 0; start < order.size(); start += sched.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(sched.batch_size));
      images.clear();
      labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        Sample s = view.get(order[i]);
        images.push_back(options.augmentations.empty() ? std::move(s.image)
                                                       : augment(s.image, options.augmentations, aug_rng));
        labels.push_back(s.label);
      }
      image_ptrs.clear();
      for (const auto& img : images) image_ptrs.push_back(&img);
      const auto x = stack_images(image_ptrs);
      const auto y = labels_to_tensor(labels);

      model::ForwardOutput fwd;
      std::optional<torch::Tensor> l_re;
      if (options.puzzle) {
        auto p = puzzle::puzzle_forward(net, x, y);
        fwd = std::move(p.full);
        l_re = p.l_re;
      } else {
        fwd = net->forward(x);
      }
      const auto abort = [&](const std::string& why) {
        throw NumericError(why + " at epoch " + std::to_string(epoch) + ", step " + std::to_string(result.steps) +
                           (result.last_checkpoint.empty() ? std::string()
                                                           : "; last good checkpoint: " + result.last_checkpoint.string()));
      };
      losses::LossTerms terms;
      try {
        terms = losses::total_loss(fwd.branch.attn_logits, fwd.logits, y, weights, l_re, options.re_weight);
      } catch (const NumericError& e) {
        abort(e.what());
      }
      const auto report = terms.report();
      if (!std::isfinite(report.total)) abort("non-finite training loss");
      opt.zero_grad();
      terms.total.backward();
      opt.step();

      const double n = static_cast<double>(end - start);
      run.l_attn += report.l_attn * n;
      run.l_cls += report.l_cls * n;
      run.l_re += report.l_re.value_or(0.0) * n;
      run.n += end - start;
      const auto pred = fwd.logits.detach().argmax(1);
      for (int64_t i = 0; i < pred.size(0); ++i) run.preds.push_back(pred[i].item<int64_t>());
      run.labels.insert(run.labels.end(), labels.begin(), labels.end());

      result.step_losses.push_back(report.total);
      result.step_lrs.push_back(static_cast<torch::optim::SGDOptions&>(opt.param_groups().front().options()).lr());
      ++result.steps;
      if (options.max_steps > 0 && result.steps >= options.max_steps) {
        stop = true;
        break;
      }
    }

    EpochMetrics train_m;
    train_m.epoch = epoch;
    train_m.split = "train";
    const double n = static_cast<double>(std::max<std::size_t>(run.n, 1));
    train_m.l_attn = run.l_attn / n;
    train_m.l_cls = run.l_cls / n;
    if (options.puzzle) train_m.l_re = run.l_re / n;
    train_m.total = train_m.l_attn + train_m.l_cls + train_m.l_re.value_or(0.0);
    if (!run.labels.empty()) {
      train_m.acc = accuracy(run.preds, run.labels);
      train_m.bal_acc = balanced_accuracy(run.preds, run.labels, net->config().num_classes);
    }
    result.metrics.push_back(train_m);
    if (metrics_out) metrics_out << nlohmann::json(train_m).dump() << '\n';

    double score = train_m.acc;
    if (val) {
      const EvalReport r = evaluate(net, *val);
      EpochMetrics val_m;
      val_m.epoch = epoch;
      val_m.split = "val";
      val_m.acc = r.acc;
      val_m.bal_acc = r.bal_acc;
      val_m.l_attn = r.loss.l_attn;
      val_m.l_cls = r.loss.l_cls;
      val_m.total = r.loss.total;
      result.metrics.push_back(val_m);
      if (metrics_out) metrics_out << nlohmann::json(val_m).dump() << '\n';
      score = r.acc;
    }
    if (metrics_out) metrics_out.flush();

    info.epoch = epoch;
    info.metrics = result.metrics.back();
    if (!options.out_dir.empty()) {
      result.last_checkpoint = options.out_dir / "last.pt";
      save_checkpoint(net, result.last_checkpoint, info);
    }
    if (score > result.best_val_acc) {
      result.best_val_acc = score;
      result.best_epoch = epoch;
      if (!options.out_dir.empty()) {
        result.best_checkpoint = options.out_dir / "best.pt";
        save_checkpoint(net, result.best_checkpoint, info);
      }
    }
  }
  return result;
}

Dataset load_for_model(const std::filesystem::path& path, DatasetFormat format, const model::ModelConfig& model,
                       const std::vector<std::int64_t>& exclude) {
  Dataset d = load_dataset(resolve_data_path(path), format, exclude.empty() ? std::optional<int>(model.num_classes)
                                                                            : std::nullopt);
  if (!exclude.empty()) d = exclude_classes(d, exclude);
  bool needs_resize = false;
  for (const auto& s : d.samples()) {
    needs_resize |= s.image.height != model.input_size || s.image.width != model.input_size;
  }
  return needs_resize ? resize_dataset(d, model.input_size) : d;
}

FitResult train(const TrainConfig& config) {
  config.validate();
  const Dataset train_set = load_for_model(config.train_data, config.format, config.model, config.exclude_classes);
  std::optional<Dataset> val_set;
  if (!config.val_data.empty()) {
    val_set = load_for_model(config.val_data, config.format, config.model, config.exclude_classes);
  }
  if (train_set.num_classes() != config.model.num_classes) {
    throw ValidationError("dataset has " + std::to_string(train_set.num_classes()) + " classes, model expects " +
                          std::to_string(config.model.num_classes));
  }

  auto net = model::build_model(config.model, config.seed);
  FitOptions opts;
  opts.schedule = config.schedule;
  opts.seed = config.seed;
  opts.puzzle = config.puzzle;
  opts.re_weight = config.re_weight;
  if (config.class_weighted) opts.class_weights = class_weights(train_set);
  opts.augmentations = config.augmentations;
  opts.max_steps = config.max_steps;
  opts.out_dir = config.out_dir;
  std::filesystem::create_directories(config.out_dir);
  std::ofstream(config.out_dir / "config.json") << nlohmann::json(config).dump(2) << '\n';
  return fit(net, plain_epochs(train_set), val_set ? &*val_set : nullptr, opts);
}

std::vector<EpochMetrics> read_metrics_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("missing metrics file " + path.string());
  std::vector<EpochMetrics> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line).get<EpochMetrics>());
  }
  return out;
}

}  // namespace msabn::harness
