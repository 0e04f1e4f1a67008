#pragma once

#include "msabn/core/dataset.hpp"
#include "msabn/core/image.hpp"

namespace msabn {

/// Single-channel attention in [0,1] produced by the attention branch for one sample.
struct AttentionMap {
  SampleId sample_id;
  FloatMap values;
};

/// Throws ValidationError if any value is non-finite or outside [0,1].
void validate_attention_map(const AttentionMap& map);

}  // namespace msabn
