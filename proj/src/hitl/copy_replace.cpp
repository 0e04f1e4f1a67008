#include "msabn/hitl/copy_replace.hpp"

#include <cstring>
#include <random>
#include <unordered_map>

#include "msabn/core/errors.hpp"

namespace msabn::hitl {

Image copy_replace(const Image& source, const BBox& source_box, const Image& target, const BBox& target_box) {
  validate_bbox(source_box, source.width, source.height, "copy-replace source");
  validate_bbox(target_box, target.width, target.height, "copy-replace target");
  if (source.channels != target.channels) throw ValidationError("copy-replace images differ in channel count");

  const Image patch = resize_bilinear(crop(source, source_box), target_box.height(), target_box.width());
  Image out = target;
  const std::size_t row_bytes = static_cast<std::size_t>(patch.width) * patch.channels;
  for (int y = 0; y < patch.height; ++y) {
    std::memcpy(&out.pixels[out.index(target_box.y_min + y, target_box.x_min, 0)], &patch.pixels[patch.index(y, 0, 0)],
                row_bytes);
  }
  return out;
}

AugmentedEpoch::AugmentedEpoch(const Dataset& split, std::vector<StreamItem> items)
    : split_(&split), items_(std::move(items)) {}

std::size_t AugmentedEpoch::augmented_count() const {
  std::size_t n = 0;
  for (const auto& it : items_) n += it.source.has_value();
  return n;
}

Sample AugmentedEpoch::materialize(std::size_t i) const {
  const StreamItem& it = items_.at(i);
  const Sample& target = (*split_)[it.target];
  if (!it.source) return target;
  const Sample& source = (*split_)[*it.source];
  Sample out;
  out.id = target.id;
  out.label = source.label;
  out.bbox = it.target_box;
  out.image = copy_replace(source.image, it.source_box, target.image, it.target_box);
  return out;
}

AugmentedEpoch build_augmented_epoch(const Dataset& split, const AugmentationPool& pool, std::uint64_t seed) {
  if (split.empty()) throw ValidationError("empty training split");
  std::unordered_map<std::string, std::size_t> annotated_slot;
  std::vector<std::size_t> annotated_index;
  for (const auto& [id, box] : pool.annotated) {
    const auto idx = split.find(id);
    if (!idx) throw ValidationError("pool sample " + id + " is not in the training split");
    annotated_slot.emplace(id, annotated_index.size());
    annotated_index.push_back(*idx);
  }

  std::mt19937_64 rng(seed);
  std::vector<StreamItem> items;
  items.reserve(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    StreamItem item;
    item.target = i;
    auto slot = annotated_slot.find(split[i].id);
    if (slot != annotated_slot.end()) {
      std::uniform_int_distribution<std::size_t> pick(0, annotated_index.size() - 1);
      const std::size_t partner = pick(rng);
      item.source = annotated_index[partner];
      item.target_box = pool.annotated[slot->second].second;
      item.source_box = pool.annotated[partner].second;
    }
    items.push_back(item);
  }
  return AugmentedEpoch(split, std::move(items));
}

}  // namespace msabn::hitl
