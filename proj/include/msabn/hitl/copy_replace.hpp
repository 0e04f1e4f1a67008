#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "msabn/core/dataset.hpp"
#include "msabn/hitl/audit.hpp"

namespace msabn::hitl {

/// Returns `target` with `target_box` overwritten by the `source_box` patch of `source`,
/// bilinearly resized to the target box. Pixels outside `target_box` are untouched.
Image copy_replace(const Image& source, const BBox& source_box, const Image& target, const BBox& target_box);

/// One entry of an epoch's training stream. `source` is set when the entry is a
/// copy-replace of `target` with an object taken from `source`.
struct StreamItem {
  std::size_t target = 0;
  std::optional<std::size_t> source;
  BBox target_box{};
  BBox source_box{};

  friend bool operator==(const StreamItem&, const StreamItem&) = default;
};

/// Pairing plan for one epoch, in split order. Images are produced on demand by `materialize`.
class AugmentedEpoch {
public:
  AugmentedEpoch(const Dataset& split, std::vector<StreamItem> items);

  std::size_t size() const { return items_.size(); }
  const std::vector<StreamItem>& items() const { return items_; }
  std::size_t augmented_count() const;

  /// The training sample for item `i`. Augmented samples carry the pasted object's label
  /// and the target box, which now frames that object.
  Sample materialize(std::size_t i) const;

private:
  const Dataset* split_;
  std::vector<StreamItem> items_;
};

/// Pairs each annotated sample with a partner drawn uniformly (with replacement, itself
/// included) from the annotated pool. Plain samples pass through. Deterministic in `seed`.
AugmentedEpoch build_augmented_epoch(const Dataset& split, const AugmentationPool& pool, std::uint64_t seed);

}  // namespace msabn::hitl
