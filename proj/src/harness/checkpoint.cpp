#include "msabn/harness/checkpoint.hpp"

#include <fstream>

#include "msabn/core/errors.hpp"

namespace msabn::harness {

void to_json(nlohmann::json& j, const CheckpointInfo& info) {
  j = nlohmann::json{{"config", info.config}, {"epoch", info.epoch}, {"metrics", info.metrics}, {"seed", info.seed}};
}

void from_json(const nlohmann::json& j, CheckpointInfo& info) {
  j.at("config").get_to(info.config);
  info.epoch = j.value("epoch", 0);
  info.metrics = j.value("metrics", nlohmann::json::object());
  info.seed = j.value("seed", std::uint64_t{0});
}

std::filesystem::path sidecar_path(const std::filesystem::path& blob) {
  auto p = blob;
  return p.replace_extension(".json");
}

void save_checkpoint(model::MsabnNet& net, const std::filesystem::path& blob, const CheckpointInfo& info) {
  if (blob.has_parent_path()) std::filesystem::create_directories(blob.parent_path());
  torch::serialize::OutputArchive archive;
  net->save(archive);
  archive.save_to(blob.string());
  std::ofstream out(sidecar_path(blob));
  if (!out) throw IngestionError("cannot write checkpoint sidecar for " + blob.string());
  out << nlohmann::json(info).dump(2) << '\n';
}

std::pair<model::MsabnNet, CheckpointInfo> load_checkpoint(const std::filesystem::path& path) {
  auto blob = path;
  if (blob.extension() == ".json") blob.replace_extension(".pt");
  const auto side = sidecar_path(blob);
  if (!std::filesystem::exists(blob)) throw IngestionError("missing checkpoint blob: " + blob.string());
  std::ifstream in(side);
  if (!in) throw IngestionError("missing checkpoint sidecar: " + side.string());
  CheckpointInfo info = nlohmann::json::parse(in).get<CheckpointInfo>();
  model::MsabnNet net(info.config);
  torch::serialize::InputArchive archive;
  archive.load_from(blob.string());
  net->load(archive);
  return {net, info};
}

}  // namespace msabn::harness
