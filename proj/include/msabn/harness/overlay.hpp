#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msabn/core/bbox.hpp"
#include "msabn/core/dataset.hpp"
#include "msabn/core/image.hpp"

namespace msabn::harness {

struct OverlayEntry {
  SampleId sample_id;
  std::string image_path;    // relative to the manifest directory
  std::string overlay_path;  // relative to the manifest directory
  std::optional<double> frac_out;
  std::int64_t predicted = 0;
  std::int64_t label = 0;
  int width = 0;
  int height = 0;
  std::optional<BBox> bbox;
};

struct OverlayManifest {
  std::vector<OverlayEntry> entries;

  const OverlayEntry* find(const SampleId& id) const;
};

void to_json(nlohmann::json& j, const OverlayEntry& e);
void from_json(const nlohmann::json& j, OverlayEntry& e);
void to_json(nlohmann::json& j, const OverlayManifest& m);
void from_json(const nlohmann::json& j, OverlayManifest& m);

OverlayManifest read_overlay_manifest(const std::filesystem::path& path);
void write_overlay_manifest(const std::filesystem::path& path, const OverlayManifest& manifest);

/// Alpha-blends a jet-coloured heat map over the image: per pixel alpha = max_alpha * a.
/// `attention` must already be at image resolution. Zero attention leaves pixels unchanged.
Image blend_overlay(const Image& image, const FloatMap& attention, double max_alpha = 0.6);

enum class SortOrder { frac_out_desc, wrong_first };

SortOrder parse_sort_order(const std::string& name);

/// Stable ordering of manifest entries. frac_out_desc puts the worst-localized samples first
/// (entries without frac_out last); wrong_first puts mispredictions first, then frac_out_desc.
std::vector<const OverlayEntry*> sorted_entries(const OverlayManifest& manifest, SortOrder order);

}  // namespace msabn::harness
