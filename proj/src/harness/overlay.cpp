#include "msabn/harness/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "msabn/core/errors.hpp"

namespace msabn::harness {

const OverlayEntry* OverlayManifest::find(const SampleId& id) const {
  for (const auto& e : entries) {
    if (e.sample_id == id) return &e;
  }
  return nullptr;
}

void to_json(nlohmann::json& j, const OverlayEntry& e) {
  j = nlohmann::json{{"sample_id", e.sample_id}, {"image_path", e.image_path}, {"overlay_path", e.overlay_path},
                     {"predicted", e.predicted}, {"label", e.label},           {"width", e.width},
                     {"height", e.height}};
  j["frac_out"] = e.frac_out ? nlohmann::json(*e.frac_out) : nlohmann::json(nullptr);
  j["bbox"] = e.bbox ? nlohmann::json(*e.bbox) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, OverlayEntry& e) {
  j.at("sample_id").get_to(e.sample_id);
  j.at("image_path").get_to(e.image_path);
  j.at("overlay_path").get_to(e.overlay_path);
  j.at("predicted").get_to(e.predicted);
  j.at("label").get_to(e.label);
  j.at("width").get_to(e.width);
  j.at("height").get_to(e.height);
  e.frac_out.reset();
  e.bbox.reset();
  if (j.contains("frac_out") && !j["frac_out"].is_null()) e.frac_out = j["frac_out"].get<double>();
  if (j.contains("bbox") && !j["bbox"].is_null()) e.bbox = j["bbox"].get<BBox>();
}

void to_json(nlohmann::json& j, const OverlayManifest& m) { j = nlohmann::json{{"entries", m.entries}}; }

void from_json(const nlohmann::json& j, OverlayManifest& m) { j.at("entries").get_to(m.entries); }

OverlayManifest read_overlay_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("missing overlay manifest " + path.string());
  try {
    return nlohmann::json::parse(in).get<OverlayManifest>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed overlay manifest " + path.string() + ": " + e.what());
  }
}

void write_overlay_manifest(const std::filesystem::path& path, const OverlayManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write overlay manifest " + path.string());
  out << nlohmann::json(manifest).dump(2) << '\n';
}

namespace {

std::array<double, 3> jet(double v) {
  auto channel = [](double x) { return std::clamp(1.5 - std::abs(4.0 * x), 0.0, 1.0); };
  return {channel(v - 0.75), channel(v - 0.5), channel(v - 0.25)};
}

}  // namespace

Image blend_overlay(const Image& image, const FloatMap& attention, double max_alpha) {
  if (attention.height != image.height || attention.width != image.width) {
    throw ValidationError("overlay attention must match the image size");
  }
  Image out(image.height, image.width, 3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const double a = std::clamp(static_cast<double>(attention.at(y, x)), 0.0, 1.0);
      const auto color = jet(a);
      for (int c = 0; c < 3; ++c) {
        const std::uint8_t base = image.at(y, x, image.channels == 1 ? 0 : c);
        if (a == 0.0) {
          out.at(y, x, c) = base;
          continue;
        }
        const double alpha = max_alpha * a;
        out.at(y, x, c) = static_cast<std::uint8_t>(std::lround((1.0 - alpha) * base + alpha * 255.0 * color[c]));
      }
    }
  }
  return out;
}

SortOrder parse_sort_order(const std::string& name) {
  if (name.empty() || name == "frac_out_desc") return SortOrder::frac_out_desc;
  if (name == "wrong_first") return SortOrder::wrong_first;
  throw ConfigError("unknown sort order '" + name + "'");
}

std::vector<const OverlayEntry*> sorted_entries(const OverlayManifest& manifest, SortOrder order) {
  std::vector<const OverlayEntry*> out;
  for (const auto& e : manifest.entries) out.push_back(&e);
  auto by_frac = [](const OverlayEntry* a, const OverlayEntry* b) {
    const double fa = a->frac_out.value_or(-1.0), fb = b->frac_out.value_or(-1.0);
    return fa > fb;
  };
  if (order == SortOrder::frac_out_desc) {
    std::stable_sort(out.begin(), out.end(), by_frac);
  } else {
    std::stable_sort(out.begin(), out.end(), [&](const OverlayEntry* a, const OverlayEntry* b) {
      const bool wa = a->predicted != a->label, wb = b->predicted != b->label;
      if (wa != wb) return wa;
      return by_frac(a, b);
    });
  }
  return out;
}

}  // namespace msabn::harness
