#include "msabn/harness/evaluate.hpp"

#include "msabn/core/errors.hpp"
#include "msabn/harness/batch.hpp"
#include "msabn/harness/checkpoint.hpp"

namespace msabn::harness {
namespace {

struct BatchOutputs {
  std::vector<std::int64_t> predictions;
  std::vector<AttentionMap> attention;
  double l_attn_sum = 0.0;
  double l_cls_sum = 0.0;
};

BatchOutputs run_eval(model::MsabnNet& net, const Dataset& dataset, int batch_size, bool keep_attention) {
  torch::NoGradGuard no_grad;
  const bool was_training = net->is_training();
  net->eval();
  BatchOutputs out;
  std::vector<const Image*> images;
  std::vector<std::int64_t> labels;
  for (std::size_t start = 0; start < dataset.size(); start += batch_size) {
    const std::size_t end = std::min(dataset.size(), start + static_cast<std::size_t>(batch_size));
    images.clear();
    labels.clear();
    for (std::size_t i = start; i < end; ++i) {
      images.push_back(&dataset[i].image);
      labels.push_back(dataset[i].label);
    }
    const auto x = stack_images(images);
    const auto y = labels_to_tensor(labels);
    const auto fwd = net->forward(x);
    const auto terms = losses::total_loss(fwd.branch.attn_logits, fwd.logits, y);
    const double n = static_cast<double>(end - start);
    out.l_attn_sum += terms.l_attn.item<double>() * n;
    out.l_cls_sum += terms.l_cls.item<double>() * n;
    const auto pred = fwd.logits.argmax(1).contiguous();
    for (int64_t i = 0; i < pred.size(0); ++i) out.predictions.push_back(pred[i].item<int64_t>());
    if (keep_attention && fwd.branch.attention.defined()) {
      const auto att = fwd.branch.attention.contiguous();
      const int h = static_cast<int>(att.size(2)), w = static_cast<int>(att.size(3));
      for (int64_t i = 0; i < att.size(0); ++i) {
        AttentionMap m{dataset[start + i].id, FloatMap(h, w)};
        const float* src = att[i].data_ptr<float>();
        std::copy(src, src + static_cast<std::size_t>(h) * w, m.values.values.begin());
        out.attention.push_back(std::move(m));
      }
    }
  }
  net->train(was_training);
  return out;
}

void check_classes(model::MsabnNet& net, const Dataset& dataset) {
  if (net->config().num_classes != dataset.num_classes()) {
    throw ValidationError("model has " + std::to_string(net->config().num_classes) + " classes, dataset has " +
                          std::to_string(dataset.num_classes()));
  }
}

}  // namespace

Inference infer(model::MsabnNet& net, const Dataset& dataset, int batch_size) {
  check_classes(net, dataset);
  auto out = run_eval(net, dataset, batch_size, true);
  return {std::move(out.predictions), std::move(out.attention)};
}

EvalReport evaluate(model::MsabnNet& net, const Dataset& dataset, int batch_size) {
  check_classes(net, dataset);
  auto out = run_eval(net, dataset, batch_size, false);
  std::vector<std::int64_t> labels;
  for (const auto& s : dataset.samples()) labels.push_back(s.label);
  EvalReport r;
  r.acc = accuracy(out.predictions, labels);
  r.bal_acc = balanced_accuracy(out.predictions, labels, dataset.num_classes());
  r.per_class_recall = per_class_recall(out.predictions, labels, dataset.num_classes());
  r.predictions = std::move(out.predictions);
  const double n = static_cast<double>(dataset.size());
  r.loss.l_attn = out.l_attn_sum / n;
  r.loss.l_cls = out.l_cls_sum / n;
  r.loss.total = r.loss.l_attn + r.loss.l_cls;
  return r;
}

EvalReport evaluate_checkpoint(const std::filesystem::path& ckpt, const Dataset& dataset, int batch_size) {
  auto [net, info] = load_checkpoint(ckpt);
  return evaluate(net, dataset, batch_size);
}

MultiRunReport evaluate_checkpoints(const std::vector<std::filesystem::path>& ckpts, const Dataset& dataset,
                                    int batch_size) {
  MultiRunReport report;
  std::vector<double> accs, bals;
  for (const auto& c : ckpts) {
    report.runs.push_back(evaluate_checkpoint(c, dataset, batch_size));
    accs.push_back(report.runs.back().acc);
    bals.push_back(report.runs.back().bal_acc);
  }
  report.acc = aggregate(accs);
  report.bal_acc = aggregate(bals);
  return report;
}

void to_json(nlohmann::json& j, const EvalReport& r) {
  nlohmann::json recalls = nlohmann::json::array();
  for (const auto& v : r.per_class_recall) recalls.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  j = nlohmann::json{{"acc", r.acc},
                     {"bal_acc", r.bal_acc},
                     {"per_class_recall", recalls},
                     {"l_attn", r.loss.l_attn},
                     {"l_cls", r.loss.l_cls},
                     {"total", r.loss.total}};
}

}  // namespace msabn::harness
