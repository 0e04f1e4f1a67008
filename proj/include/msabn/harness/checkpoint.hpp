#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include <json.hpp>

#include "msabn/model/msabn.hpp"

namespace msabn::harness {

/// JSON sidecar stored next to every weight blob.
struct CheckpointInfo {
  model::ModelConfig config;
  int epoch = 0;
  nlohmann::json metrics = nlohmann::json::object();
  std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const CheckpointInfo& info);
void from_json(const nlohmann::json& j, CheckpointInfo& info);

/// `blob` is the weight file (e.g. best.pt); the sidecar goes to the same stem with .json.
void save_checkpoint(model::MsabnNet& net, const std::filesystem::path& blob, const CheckpointInfo& info);

/// Accepts either the blob or the sidecar path. Throws IngestionError when files are missing.
std::pair<model::MsabnNet, CheckpointInfo> load_checkpoint(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& blob);

}  // namespace msabn::harness
