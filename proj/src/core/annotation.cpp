#include "msabn/core/annotation.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "msabn/core/errors.hpp"

namespace msabn {

void to_json(nlohmann::json& j, const AnnotationRecord& r) {
  j = nlohmann::json{{"sample_id", r.sample_id}, {"bbox", r.bbox}, {"author", r.author}, {"timestamp", r.timestamp}};
}

void from_json(const nlohmann::json& j, AnnotationRecord& r) {
  j.at("sample_id").get_to(r.sample_id);
  j.at("bbox").get_to(r.bbox);
  r.author = j.value("author", std::string{});
  r.timestamp = j.value("timestamp", std::int64_t{0});
}

std::int64_t utc_now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

AnnotationStore::AnnotationStore(std::filesystem::path path) : path_(std::move(path)) {}

void AnnotationStore::append(const AnnotationRecord& record) {
  const std::string line = nlohmann::json(record).dump() + "\n";
  std::lock_guard lock(mutex_);
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw IngestionError("cannot open annotation store " + path_.string());
  out << line;
  out.flush();
}

std::vector<AnnotationRecord> AnnotationStore::load() const {
  std::lock_guard lock(mutex_);
  std::vector<AnnotationRecord> records;
  std::ifstream in(path_);
  if (!in) return records;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      records.push_back(nlohmann::json::parse(line).get<AnnotationRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("annotation store " + path_.string() + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return records;
}

std::map<SampleId, AnnotationRecord> AnnotationStore::latest() const {
  std::map<SampleId, AnnotationRecord> out;
  for (auto& r : load()) out[r.sample_id] = r;
  return out;
}

std::string AnnotationStore::raw() const {
  std::lock_guard lock(mutex_);
  std::ifstream in(path_);
  std::ostringstream ss;
  if (in) ss << in.rdbuf();
  return ss.str();
}

void validate_annotation(const AnnotationRecord& record, const Dataset& dataset) {
  const auto idx = dataset.find(record.sample_id);
  if (!idx) throw ValidationError("annotation refers to unknown sample " + record.sample_id);
  const auto& img = dataset[*idx].image;
  validate_bbox(record.bbox, img.width, img.height, "annotation of " + record.sample_id);
}

Dataset apply_annotations(const Dataset& dataset, const std::map<SampleId, AnnotationRecord>& latest) {
  std::vector<Sample> samples = dataset.samples();
  for (auto& s : samples) {
    auto it = latest.find(s.id);
    if (it == latest.end()) continue;
    validate_bbox(it->second.bbox, s.image.width, s.image.height, "annotation of " + s.id);
    s.bbox = it->second.bbox;
  }
  return Dataset::from_samples(std::move(samples), dataset.num_classes());
}

}  // namespace msabn
