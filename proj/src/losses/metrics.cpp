#include "msabn/losses/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "msabn/core/errors.hpp"

namespace msabn {
namespace {

void check_lengths(std::span<const std::int64_t> predictions, std::span<const std::int64_t> labels) {
  if (predictions.size() != labels.size()) throw ValidationError("predictions and labels differ in length");
  if (labels.empty()) throw ValidationError("cannot score an empty prediction set");
}

}  // namespace

double accuracy(std::span<const std::int64_t> predictions, std::span<const std::int64_t> labels) {
  check_lengths(predictions, labels);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predictions[i] == labels[i];
  return 100.0 * static_cast<double>(correct) / static_cast<double>(labels.size());
}

std::vector<std::optional<double>> per_class_recall(std::span<const std::int64_t> predictions,
                                                    std::span<const std::int64_t> labels, int num_classes) {
  check_lengths(predictions, labels);
  std::vector<std::size_t> hits(num_classes, 0), seen(num_classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw ValidationError("label " + std::to_string(labels[i]) + " outside [0," + std::to_string(num_classes) + ")");
    }
    ++seen[labels[i]];
    hits[labels[i]] += predictions[i] == labels[i];
  }
  std::vector<std::optional<double>> recall(num_classes);
  for (int k = 0; k < num_classes; ++k) {
    if (seen[k]) recall[k] = static_cast<double>(hits[k]) / static_cast<double>(seen[k]);
  }
  return recall;
}

double balanced_accuracy(std::span<const std::int64_t> predictions, std::span<const std::int64_t> labels,
                         int num_classes) {
  const auto recall = per_class_recall(predictions, labels, num_classes);
  double sum = 0.0;
  int present = 0;
  for (const auto& r : recall) {
    if (!r) continue;
    sum += *r;
    ++present;
  }
  if (present == 0) throw ValidationError("no class present in labels");
  return 100.0 * sum / present;
}

std::string MeanStd::format() const {
  char buf[64];
  if (std) {
    std::snprintf(buf, sizeof(buf), "%.2f±%.3f", mean, *std);
  } else {
    std::snprintf(buf, sizeof(buf), "%.2f", mean);
  }
  return buf;
}

MeanStd aggregate(std::span<const double> values) {
  if (values.empty()) throw ValidationError("cannot aggregate zero runs");
  MeanStd out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

void to_json(nlohmann::json& j, const EpochMetrics& m) {
  j = nlohmann::json{{"epoch", m.epoch}, {"split", m.split}, {"acc", m.acc}, {"bal_acc", m.bal_acc},
                     {"l_attn", m.l_attn}, {"l_cls", m.l_cls}, {"total", m.total}};
  j["l_re"] = m.l_re ? nlohmann::json(*m.l_re) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, EpochMetrics& m) {
  j.at("epoch").get_to(m.epoch);
  j.at("split").get_to(m.split);
  j.at("acc").get_to(m.acc);
  j.at("bal_acc").get_to(m.bal_acc);
  j.at("l_attn").get_to(m.l_attn);
  j.at("l_cls").get_to(m.l_cls);
  j.at("total").get_to(m.total);
  if (j.contains("l_re") && !j.at("l_re").is_null()) m.l_re = j.at("l_re").get<double>();
}

}  // namespace msabn
