#include "msabn/core/attention_map.hpp"

#include <cmath>

#include "msabn/core/errors.hpp"

namespace msabn {

void validate_attention_map(const AttentionMap& map) {
  for (float v : map.values.values) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw ValidationError("attention map for " + map.sample_id + " has a value outside [0,1]");
    }
  }
}

}  // namespace msabn
