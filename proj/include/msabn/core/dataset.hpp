#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "msabn/core/bbox.hpp"
#include "msabn/core/image.hpp"

namespace msabn {

using SampleId = std::string;

struct Sample {
  SampleId id;
  Image image;
  std::int64_t label = 0;
  std::optional<BBox> bbox;
};

enum class DatasetFormat { cifar_binary, folder_manifest };

DatasetFormat parse_dataset_format(const std::string& name);
std::string to_string(DatasetFormat format);

/// Ordered, validated collection of samples. Immutable once built.
class Dataset {
public:
  Dataset() = default;

  /// Validates ids, labels and boxes. Throws ValidationError on the first violation.
  static Dataset from_samples(std::vector<Sample> samples, int num_classes);

  const std::vector<Sample>& samples() const { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  int num_classes() const { return num_classes_; }
  const std::vector<std::size_t>& class_counts() const { return class_counts_; }

  /// Position of a sample id, or nothing.
  std::optional<std::size_t> find(const SampleId& id) const;

private:
  std::vector<Sample> samples_;
  int num_classes_ = 0;
  std::vector<std::size_t> class_counts_;
};

/// Reads a dataset. For `folder_manifest` the path is the CSV manifest (image paths are
/// relative to its directory); for `cifar_binary` it is one CIFAR-10/100 `.bin` file.
/// When `num_classes` is absent it is inferred as max(label)+1 (or 10/100 for CIFAR).
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     std::optional<int> num_classes = std::nullopt);

/// Writes every image as PNG under `image_dir` (relative to the manifest directory) and the
/// manifest CSV itself.
void write_manifest(const Dataset& dataset, const std::filesystem::path& manifest_path,
                    const std::string& image_dir = "images");

/// Per-class loss weights N / (K * count_k). Throws ValidationError listing empty classes.
std::vector<double> class_weights(const Dataset& dataset);
std::vector<double> class_weights(const std::vector<std::size_t>& counts);

/// Keeps samples whose label is not in `excluded`, remapping labels to stay contiguous.
Dataset exclude_classes(const Dataset& dataset, const std::vector<std::int64_t>& excluded);

/// Resizes every image to size x size, scaling boxes with it.
Dataset resize_dataset(const Dataset& dataset, int size);

/// Resolves a dataset path against MSABN_DATA_ROOT when it is relative.
std::filesystem::path resolve_data_path(const std::filesystem::path& path);

}  // namespace msabn
