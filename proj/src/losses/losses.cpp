#include "msabn/losses/losses.hpp"

#include "msabn/core/errors.hpp"

namespace msabn::losses {

LossReport LossTerms::report() const {
  LossReport r;
  r.l_attn = l_attn.item<double>();
  r.l_cls = l_cls.item<double>();
  r.total = r.l_attn + r.l_cls;
  if (l_re.defined()) {
    r.l_re = l_re.item<double>();
    r.total += *r.l_re;
  }
  return r;
}

torch::Tensor cross_entropy(const torch::Tensor& logits, const torch::Tensor& labels,
                            const std::optional<torch::Tensor>& weights) {
  const auto target = labels.to(torch::kLong);
  auto nll = -torch::log_softmax(logits, 1).gather(1, target.unsqueeze(1)).squeeze(1);
  if (weights) nll = nll * weights->to(logits.dtype()).index_select(0, target);
  return nll.mean();
}

namespace {

void check_finite(const torch::Tensor& logits, const char* branch) {
  if (!torch::isfinite(logits).all().item<bool>()) {
    throw NumericError(std::string("non-finite logits from the ") + branch + " branch");
  }
}

}  // namespace

LossTerms total_loss(const torch::Tensor& attn_logits, const torch::Tensor& cls_logits, const torch::Tensor& labels,
                     const std::optional<torch::Tensor>& weights, const std::optional<torch::Tensor>& l_re,
                     double re_weight) {
  if (weights && !(*weights > 0).all().item<bool>()) throw ValidationError("class weights must be positive");
  check_finite(cls_logits, "perception");
  LossTerms t;
  t.l_cls = cross_entropy(cls_logits, labels, weights);
  if (attn_logits.defined()) {
    check_finite(attn_logits, "attention");
    t.l_attn = cross_entropy(attn_logits, labels, weights);
  } else {
    t.l_attn = torch::zeros({}, cls_logits.options());
  }
  t.total = t.l_attn + t.l_cls;
  if (l_re && l_re->defined()) {
    t.l_re = *l_re * re_weight;
    t.total = t.total + t.l_re;
  }
  return t;
}

}  // namespace msabn::losses
