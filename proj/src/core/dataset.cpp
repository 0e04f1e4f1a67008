#include "msabn/core/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "msabn/core/cifar.hpp"
#include "msabn/core/errors.hpp"

namespace msabn {
namespace {

const std::vector<std::string> kManifestColumns = {"id", "path", "label", "x_min", "y_min", "x_max", "y_max"};

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::optional<long> parse_int(const std::string& text) {
  long value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

std::string sanitize_filename(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

Dataset load_manifest(const std::filesystem::path& manifest, std::optional<int> num_classes) {
  std::ifstream in(manifest);
  if (!in) throw IngestionError("missing manifest file: " + manifest.string());
  const auto base = manifest.parent_path();

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty dataset: " + manifest.string());
  const auto header = split_csv_line(line);
  if (header.size() != 3 && header.size() != kManifestColumns.size()) {
    throw ValidationError("manifest header must be id,path,label[,x_min,y_min,x_max,y_max]");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != kManifestColumns[i]) {
      throw ValidationError("manifest header column " + std::to_string(i) + " must be '" +
                            kManifestColumns[i] + "', got '" + header[i] + "'");
    }
  }

  std::vector<Sample> samples;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() < 3) {
      throw ValidationError("manifest row " + std::to_string(row) + " has fewer than 3 columns");
    }
    Sample s;
    s.id = fields[0];
    if (s.id.empty()) throw ValidationError("manifest row " + std::to_string(row) + " has an empty id");
    const auto label = parse_int(fields[2]);
    if (!label || *label < 0) throw ValidationError("sample " + s.id + ": label '" + fields[2] + "' is not a class index");
    s.label = *label;

    fields.resize(kManifestColumns.size());
    const bool any_box = std::any_of(fields.begin() + 3, fields.end(), [](const auto& f) { return !f.empty(); });
    if (any_box) {
      std::array<long, 4> coords{};
      for (int k = 0; k < 4; ++k) {
        const auto v = parse_int(fields[3 + k]);
        if (!v) throw ValidationError("sample " + s.id + ": malformed bbox column " + kManifestColumns[3 + k]);
        coords[k] = *v;
      }
      s.bbox = BBox{static_cast<int>(coords[0]), static_cast<int>(coords[1]), static_cast<int>(coords[2]),
                    static_cast<int>(coords[3])};
      if (s.bbox->x_max <= s.bbox->x_min || s.bbox->y_max <= s.bbox->y_min) {
        validate_bbox(*s.bbox, s.bbox->x_max, s.bbox->y_max, "sample " + s.id);
      }
    }
    s.image = read_png(base / fields[1]);
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw ValidationError("empty dataset: " + manifest.string());

  int k = num_classes.value_or(0);
  if (!num_classes) {
    for (const auto& s : samples) k = std::max<int>(k, static_cast<int>(s.label) + 1);
  }
  return Dataset::from_samples(std::move(samples), k);
}

}  // namespace

DatasetFormat parse_dataset_format(const std::string& name) {
  if (name == "cifar_binary") return DatasetFormat::cifar_binary;
  if (name == "folder_manifest") return DatasetFormat::folder_manifest;
  throw ConfigError("unknown dataset format '" + name + "'");
}

std::string to_string(DatasetFormat format) {
  return format == DatasetFormat::cifar_binary ? "cifar_binary" : "folder_manifest";
}

Dataset Dataset::from_samples(std::vector<Sample> samples, int num_classes) {
  if (samples.empty()) throw ValidationError("empty dataset");
  if (num_classes < 1) throw ValidationError("num_classes must be positive");
  Dataset d;
  d.num_classes_ = num_classes;
  d.class_counts_.assign(num_classes, 0);
  std::unordered_set<std::string> ids;
  for (const auto& s : samples) {
    if (!ids.insert(s.id).second) throw ValidationError("duplicate sample id " + s.id);
    if (s.label < 0 || s.label >= num_classes) {
      throw ValidationError("sample " + s.id + ": label " + std::to_string(s.label) + " >= num_classes " +
                            std::to_string(num_classes));
    }
    if (s.image.empty() || s.image.pixels.size() !=
                               static_cast<std::size_t>(s.image.height) * s.image.width * s.image.channels) {
      throw ValidationError("sample " + s.id + ": image buffer does not match its dimensions");
    }
    if (s.bbox) validate_bbox(*s.bbox, s.image.width, s.image.height, "sample " + s.id);
    ++d.class_counts_[s.label];
  }
  d.samples_ = std::move(samples);
  return d;
}

std::optional<std::size_t> Dataset::find(const SampleId& id) const {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i].id == id) return i;
  }
  return std::nullopt;
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format, std::optional<int> num_classes) {
  if (!std::filesystem::exists(path)) throw IngestionError("missing file: " + path.string());
  if (format == DatasetFormat::folder_manifest) return load_manifest(path, num_classes);
  Dataset d = read_cifar_binary(path);
  if (num_classes && *num_classes != d.num_classes()) {
    std::vector<Sample> samples = d.samples();
    return Dataset::from_samples(std::move(samples), *num_classes);
  }
  return d;
}

void write_manifest(const Dataset& dataset, const std::filesystem::path& manifest_path,
                    const std::string& image_dir) {
  const auto base = manifest_path.has_parent_path() ? manifest_path.parent_path() : std::filesystem::path(".");
  std::filesystem::create_directories(base / image_dir);
  std::ofstream out(manifest_path);
  if (!out) throw IngestionError("cannot write manifest " + manifest_path.string());
  out << "id,path,label,x_min,y_min,x_max,y_max\n";
  for (const auto& s : dataset.samples()) {
    if (s.id.find_first_of(",\n\r") != std::string::npos) {
      throw ValidationError("sample id '" + s.id + "' cannot be stored in a CSV manifest");
    }
    const std::string rel = image_dir + "/" + sanitize_filename(s.id) + ".png";
    write_png(base / rel, s.image);
    out << s.id << ',' << rel << ',' << s.label;
    if (s.bbox) {
      out << ',' << s.bbox->x_min << ',' << s.bbox->y_min << ',' << s.bbox->x_max << ',' << s.bbox->y_max << '\n';
    } else {
      out << ",,,,\n";
    }
  }
}

std::vector<double> class_weights(const std::vector<std::size_t>& counts) {
  std::vector<std::size_t> empty;
  std::size_t total = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) empty.push_back(k);
    total += counts[k];
  }
  if (!empty.empty()) {
    std::string msg = empty.size() == 1 ? "class " : "classes ";
    for (std::size_t i = 0; i < empty.size(); ++i) msg += (i ? "," : "") + std::to_string(empty[i]);
    throw ValidationError(msg + " empty");
  }
  const double k = static_cast<double>(counts.size());
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) w[i] = static_cast<double>(total) / (k * counts[i]);
  return w;
}

std::vector<double> class_weights(const Dataset& dataset) { return class_weights(dataset.class_counts()); }

Dataset exclude_classes(const Dataset& dataset, const std::vector<std::int64_t>& excluded) {
  std::set<std::int64_t> drop(excluded.begin(), excluded.end());
  std::vector<std::int64_t> remap(dataset.num_classes(), -1);
  std::int64_t next = 0;
  for (int k = 0; k < dataset.num_classes(); ++k) {
    if (!drop.count(k)) remap[k] = next++;
  }
  std::vector<Sample> kept;
  for (const auto& s : dataset.samples()) {
    if (remap[s.label] < 0) continue;
    Sample c = s;
    c.label = remap[s.label];
    kept.push_back(std::move(c));
  }
  return Dataset::from_samples(std::move(kept), static_cast<int>(next));
}

Dataset resize_dataset(const Dataset& dataset, int size) {
  std::vector<Sample> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples()) {
    Sample c;
    c.id = s.id;
    c.label = s.label;
    c.image = resize_bilinear(s.image, size, size);
    if (s.bbox) c.bbox = scale_bbox(*s.bbox, s.image.width, s.image.height, size, size);
    out.push_back(std::move(c));
  }
  return Dataset::from_samples(std::move(out), dataset.num_classes());
}

std::filesystem::path resolve_data_path(const std::filesystem::path& path) {
  if (path.is_absolute()) return path;
  const char* root = std::getenv("MSABN_DATA_ROOT");
  if (root && *root && !std::filesystem::exists(path)) return std::filesystem::path(root) / path;
  return path;
}

}  // namespace msabn
