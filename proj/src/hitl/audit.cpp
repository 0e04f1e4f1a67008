#include "msabn/hitl/audit.hpp"

#include <fstream>
#include <sstream>

#include "msabn/core/errors.hpp"

namespace msabn::hitl {

BinaryMap binarize_attention(const AttentionMap& attention, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("binarization threshold must lie in (0,1), got " + std::to_string(threshold));
  }
  const auto& v = attention.values;
  BinaryMap out{v.height, v.width, std::vector<std::uint8_t>(v.values.size(), 0)};
  for (std::size_t i = 0; i < v.values.size(); ++i) out.bits[i] = v.values[i] >= threshold ? 1 : 0;
  return out;
}

AttentionSplit split_attention(const BinaryMap& binary, const BBox& box) {
  AttentionSplit s;
  for (int y = 0; y < binary.height; ++y) {
    for (int x = 0; x < binary.width; ++x) {
      if (!binary.at(y, x)) continue;
      ++s.on_pixels;
      if (!box.contains(x, y)) ++s.outside_pixels;
    }
  }
  if (s.on_pixels == 0) {
    s.empty = true;
    return s;
  }
  s.frac_out = static_cast<double>(s.outside_pixels) / static_cast<double>(s.on_pixels);
  s.frac_in = static_cast<double>(s.on_pixels - s.outside_pixels) / static_cast<double>(s.on_pixels);
  return s;
}

AttentionAudit audit_sample(const AttentionMap& attention, const std::optional<BBox>& box, int image_width,
                            int image_height, double threshold) {
  AttentionMap upscaled{attention.sample_id, resize_bilinear(attention.values, image_height, image_width)};
  const BinaryMap binary = binarize_attention(upscaled, threshold);
  AttentionAudit audit;
  audit.sample_id = attention.sample_id;
  audit.has_bbox = box.has_value();
  for (auto b : binary.bits) audit.total_on_pixels += b;
  audit.empty_attention = audit.total_on_pixels == 0;
  if (box) {
    validate_bbox(*box, image_width, image_height, "audit of " + attention.sample_id);
    audit.frac_out = split_attention(binary, *box).frac_out;
  }
  return audit;
}

AugmentationPool select_pool(std::span<AttentionAudit> audits, double lambda_out, const Dataset& split) {
  std::vector<std::size_t> position(audits.size());
  std::vector<std::string> missing;
  std::vector<bool> chosen(split.size(), false);
  AugmentationPool pool;
  for (auto& a : audits) {
    a.selected = a.frac_out > lambda_out;
    if (!a.selected) continue;
    const auto idx = split.find(a.sample_id);
    if (!idx) throw ValidationError("audited sample " + a.sample_id + " is not in the training split");
    const auto& s = split[*idx];
    if (!s.bbox) {
      missing.push_back(a.sample_id);
      continue;
    }
    chosen[*idx] = true;
  }
  if (!missing.empty()) {
    std::string msg = "selected samples lack a bounding box:";
    for (const auto& id : missing) msg += " " + id;
    throw ValidationError(msg);
  }
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto& s = split[i];
    if (chosen[i]) {
      pool.annotated.emplace_back(s.id, *s.bbox);
    } else {
      pool.plain.push_back(s.id);
    }
  }
  return pool;
}

void write_audit_csv(const std::string& path, std::span<const AttentionAudit> audits) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write audit report " + path);
  out << "sample_id,frac_out,total_on_pixels,selected\n";
  out.precision(17);
  for (const auto& a : audits) {
    out << a.sample_id << ',' << a.frac_out << ',' << a.total_on_pixels << ',' << (a.selected ? 1 : 0) << '\n';
  }
}

std::vector<AttentionAudit> read_audit_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("missing audit report " + path);
  std::string line;
  std::getline(in, line);
  std::vector<AttentionAudit> audits;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id, frac, on, sel;
    std::getline(row, id, ',');
    std::getline(row, frac, ',');
    std::getline(row, on, ',');
    std::getline(row, sel, ',');
    AttentionAudit a;
    a.sample_id = id;
    try {
      a.frac_out = std::stod(frac);
      a.total_on_pixels = std::stol(on);
    } catch (const std::exception&) {
      throw ValidationError("malformed audit row for " + id);
    }
    a.selected = sel == "1";
    a.empty_attention = a.total_on_pixels == 0;
    audits.push_back(a);
  }
  return audits;
}

}  // namespace msabn::hitl
