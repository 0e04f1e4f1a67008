#pragma once

#include <optional>

#include <torch/torch.h>

namespace msabn::losses {

/// Scalar loss values of one step. total = l_attn + l_cls (+ l_re).
struct LossReport {
  double l_attn = 0.0;
  double l_cls = 0.0;
  std::optional<double> l_re;
  double total = 0.0;
};

struct LossTerms {
  torch::Tensor l_attn;
  torch::Tensor l_cls;
  torch::Tensor l_re;  // undefined without the puzzle term
  torch::Tensor total;

  LossReport report() const;
};

/// Cross-entropy averaged over the batch; with `weights` each sample's term is scaled by
/// the weight of its label before averaging (divided by B, not by the weight sum).
torch::Tensor cross_entropy(const torch::Tensor& logits, const torch::Tensor& labels,
                            const std::optional<torch::Tensor>& weights = std::nullopt);

/// Attention-branch plus perception-branch cross-entropy, plus the reconstruction term when
/// given (scaled by `re_weight`; the reported l_re is the scaled value). An undefined
/// `attn_logits` (no attention branch) contributes zero. Throws NumericError naming the
/// branch whose logits are not finite.
LossTerms total_loss(const torch::Tensor& attn_logits, const torch::Tensor& cls_logits, const torch::Tensor& labels,
                     const std::optional<torch::Tensor>& weights = std::nullopt,
                     const std::optional<torch::Tensor>& l_re = std::nullopt, double re_weight = 1.0);

}  // namespace msabn::losses
