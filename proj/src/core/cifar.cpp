#include "msabn/core/cifar.hpp"

#include <fstream>
#include <iterator>

#include "msabn/core/errors.hpp"

namespace msabn {
namespace {

constexpr std::size_t kPixels = 32 * 32 * 3;

}  // namespace

Dataset read_cifar_binary(const std::filesystem::path& bin_path, std::optional<CifarVariant> variant) {
  std::ifstream in(bin_path, std::ios::binary);
  if (!in) throw IngestionError("missing CIFAR batch: " + bin_path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.empty()) throw ValidationError("empty dataset: " + bin_path.string());

  if (!variant) {
    const bool fits10 = bytes.size() % (kPixels + 1) == 0;
    const bool fits100 = bytes.size() % (kPixels + 2) == 0;
    if (fits10 == fits100) {
      const auto name = bin_path.filename().string();
      variant = (name == "train.bin" || name == "test.bin") ? CifarVariant::cifar100 : CifarVariant::cifar10;
    } else {
      variant = fits100 ? CifarVariant::cifar100 : CifarVariant::cifar10;
    }
  }
  const std::size_t label_bytes = *variant == CifarVariant::cifar100 ? 2 : 1;
  const std::size_t record = kPixels + label_bytes;
  if (bytes.size() % record != 0) {
    throw ValidationError("CIFAR batch " + bin_path.string() + " is not a whole number of records");
  }

  const std::string stem = bin_path.stem().string();
  std::vector<Sample> samples;
  samples.reserve(bytes.size() / record);
  for (std::size_t off = 0, n = 0; off < bytes.size(); off += record, ++n) {
    Sample s;
    s.id = stem + "_" + std::to_string(n);
    s.label = bytes[off + label_bytes - 1];
    s.image = Image(32, 32, 3);
    // Planar R, G, B -> interleaved.
    const std::uint8_t* planes = &bytes[off + label_bytes];
    for (int c = 0; c < 3; ++c) {
      for (int p = 0; p < 32 * 32; ++p) s.image.pixels[p * 3 + c] = planes[c * 1024 + p];
    }
    samples.push_back(std::move(s));
  }
  return Dataset::from_samples(std::move(samples), *variant == CifarVariant::cifar100 ? 100 : 10);
}

std::size_t convert_cifar(const std::filesystem::path& bin_path, const std::filesystem::path& out_dir,
                          std::optional<CifarVariant> variant) {
  const Dataset d = read_cifar_binary(bin_path, variant);
  std::filesystem::create_directories(out_dir);
  write_manifest(d, out_dir / (bin_path.stem().string() + ".csv"), bin_path.stem().string());
  return d.size();
}

}  // namespace msabn
