#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace msabn {

/// 100 * correct / total.
double accuracy(std::span<const std::int64_t> predictions, std::span<const std::int64_t> labels);

/// Recall per class; classes with no labelled samples have no value.
std::vector<std::optional<double>> per_class_recall(std::span<const std::int64_t> predictions,
                                                    std::span<const std::int64_t> labels, int num_classes);

/// Mean recall over the classes present in `labels`, as a percentage.
double balanced_accuracy(std::span<const std::int64_t> predictions, std::span<const std::int64_t> labels,
                         int num_classes);

/// Mean and sample standard deviation over repeated runs. A single run has no deviation.
struct MeanStd {
  double mean = 0.0;
  std::optional<double> std;

  /// "70.06±0.025", or "70.06" without a deviation.
  std::string format() const;
};

MeanStd aggregate(std::span<const double> values);

/// One line of the per-epoch metrics stream.
struct EpochMetrics {
  int epoch = 0;
  std::string split;
  double acc = 0.0;
  double bal_acc = 0.0;
  double l_attn = 0.0;
  double l_cls = 0.0;
  std::optional<double> l_re;
  double total = 0.0;

  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

void to_json(nlohmann::json& j, const EpochMetrics& m);
void from_json(const nlohmann::json& j, EpochMetrics& m);

}  // namespace msabn
