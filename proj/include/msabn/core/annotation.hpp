#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "msabn/core/bbox.hpp"
#include "msabn/core/dataset.hpp"

namespace msabn {

/// A human bounding-box correction for one sample.
struct AnnotationRecord {
  SampleId sample_id;
  BBox bbox;
  std::string author;
  std::int64_t timestamp = 0;  // UTC seconds

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

void to_json(nlohmann::json& j, const AnnotationRecord& r);
void from_json(const nlohmann::json& j, AnnotationRecord& r);

std::int64_t utc_now_seconds();

/// Append-only newline-delimited JSON store. Appends are serialized; reads see every
/// complete line written so far.
class AnnotationStore {
public:
  explicit AnnotationStore(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }

  void append(const AnnotationRecord& record);
  std::vector<AnnotationRecord> load() const;
  /// Latest record per sample (later lines win).
  std::map<SampleId, AnnotationRecord> latest() const;
  std::string raw() const;

private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
};

/// Checks a record against the dataset: the id exists and the box fits that image.
void validate_annotation(const AnnotationRecord& record, const Dataset& dataset);

/// Copy of `dataset` where each annotated sample's box is replaced by its latest correction.
Dataset apply_annotations(const Dataset& dataset, const std::map<SampleId, AnnotationRecord>& latest);

}  // namespace msabn
