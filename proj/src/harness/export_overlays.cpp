#include "msabn/harness/export_overlays.hpp"

#include <cctype>

#include "msabn/core/errors.hpp"
#include "msabn/harness/evaluate.hpp"
#include "msabn/hitl/audit.hpp"

namespace msabn::harness {
namespace {

std::string file_stem(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return out;
}

}  // namespace

OverlayManifest export_overlays(model::MsabnNet& net, const Dataset& dataset, const std::filesystem::path& out_dir,
                                double threshold) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  std::filesystem::create_directories(out_dir / "overlays", ec);
  if (ec) throw IngestionError("cannot create overlay directory " + out_dir.string() + ": " + ec.message());

  const Inference inf = infer(net, dataset);
  if (inf.attention.size() != dataset.size()) throw ConfigError("overlay export needs an attention branch");

  OverlayManifest manifest;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Sample& s = dataset[i];
    const FloatMap full = resize_bilinear(inf.attention[i].values, s.image.height, s.image.width);
    OverlayEntry e;
    e.sample_id = s.id;
    e.image_path = "images/" + file_stem(s.id) + ".png";
    e.overlay_path = "overlays/" + file_stem(s.id) + ".png";
    e.predicted = inf.predictions[i];
    e.label = s.label;
    e.width = s.image.width;
    e.height = s.image.height;
    e.bbox = s.bbox;
    if (s.bbox) {
      e.frac_out = hitl::audit_sample(inf.attention[i], s.bbox, s.image.width, s.image.height, threshold).frac_out;
    }
    write_png(out_dir / e.image_path, s.image);
    write_png(out_dir / e.overlay_path, blend_overlay(s.image, full));
    manifest.entries.push_back(std::move(e));
  }
  write_overlay_manifest(out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace msabn::harness
