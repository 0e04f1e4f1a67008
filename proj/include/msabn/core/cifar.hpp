#pragma once

#include <filesystem>
#include <optional>

#include "msabn/core/dataset.hpp"

namespace msabn {

enum class CifarVariant { cifar10, cifar100 };

/// Parses a CIFAR binary batch. CIFAR-10 records are <label, 3072 bytes>; CIFAR-100 records
/// are <coarse, fine, 3072 bytes> and the fine label is used. The variant is inferred from
/// the record size when not given.
Dataset read_cifar_binary(const std::filesystem::path& bin_path,
                          std::optional<CifarVariant> variant = std::nullopt);

/// Converts a CIFAR binary batch into PNGs plus a folder manifest. Returns the sample count.
std::size_t convert_cifar(const std::filesystem::path& bin_path,
                          const std::filesystem::path& out_dir,
                          std::optional<CifarVariant> variant = std::nullopt);

}  // namespace msabn
