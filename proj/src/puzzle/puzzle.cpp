#include "msabn/puzzle/puzzle.hpp"

#include "msabn/core/errors.hpp"

namespace msabn::puzzle {

TileBatch tile(const torch::Tensor& images) {
  if (images.dim() != 4) throw ValidationError("tile expects a B x C x H x W tensor");
  const int64_t b = images.size(0), c = images.size(1), h = images.size(2), w = images.size(3);
  if (h % 2 != 0 || w % 2 != 0) {
    throw ValidationError("odd spatial size " + std::to_string(h) + "x" + std::to_string(w) +
                          "; pad or resize to even sides before tiling");
  }
  auto tiles = images.reshape({b, c, 2, h / 2, 2, w / 2}).permute({0, 2, 4, 1, 3, 5}).reshape({4 * b, c, h / 2, w / 2});
  return {tiles, b};
}

torch::Tensor merge_batch(const torch::Tensor& tile_maps) {
  if (tile_maps.dim() != 4 || tile_maps.size(0) % 4 != 0) {
    throw ValidationError("merge expects 4B x K x h x w tile maps");
  }
  const int64_t b = tile_maps.size(0) / 4, k = tile_maps.size(1), h = tile_maps.size(2), w = tile_maps.size(3);
  return tile_maps.reshape({b, 2, 2, k, h, w}).permute({0, 3, 1, 4, 2, 5}).reshape({b, k, 2 * h, 2 * w});
}

torch::Tensor reassemble(const TileBatch& tiles) { return merge_batch(tiles.tiles); }

torch::Tensor merge(std::span<const torch::Tensor> tile_maps) {
  if (tile_maps.size() != 4) throw ValidationError("merge needs exactly 4 tiles");
  const auto ref = tile_maps[0].sizes();
  if (ref.size() != 3) throw ValidationError("tile 0 must be K x h x w");
  for (std::size_t t = 1; t < 4; ++t) {
    if (tile_maps[t].sizes() != ref) {
      throw ValidationError("tile " + std::to_string(t) + " shape differs from tile 0");
    }
  }
  return merge_batch(torch::stack({tile_maps[0], tile_maps[1], tile_maps[2], tile_maps[3]})).squeeze(0);
}

torch::Tensor reconstruction_loss(const torch::Tensor& cam_full, const torch::Tensor& cam_merged,
                                  const torch::Tensor& labels) {
  if (cam_full.sizes() != cam_merged.sizes()) throw ValidationError("CAM shapes differ");
  if (cam_full.dim() != 4 || labels.dim() != 1 || labels.size(0) != cam_full.size(0)) {
    throw ValidationError("reconstruction loss expects B x K x h x w maps and B labels");
  }
  const auto index = labels.to(torch::kLong).view({-1, 1, 1, 1}).expand({-1, 1, cam_full.size(2), cam_full.size(3)});
  const auto a = cam_full.gather(1, index);
  const auto b = cam_merged.gather(1, index);
  return (a - b).abs().mean();
}

PuzzleOutput puzzle_forward(model::MsabnNet& net, const torch::Tensor& images, const torch::Tensor& labels) {
  if (!net->has_attention_branch()) throw ConfigError("the puzzle loss needs an attention branch");
  PuzzleOutput out;
  out.full = net->forward(images);
  const TileBatch tiles = tile(images);
  const auto tile_out = net->forward(tiles.tiles);
  out.merged_cam = merge_batch(tile_out.branch.cam);
  const auto& full_cam = out.full.branch.cam;
  if (out.merged_cam.sizes() != full_cam.sizes()) {
    namespace F = torch::nn::functional;
    out.merged_cam = F::interpolate(out.merged_cam, F::InterpolateFuncOptions()
                                                        .size(std::vector<int64_t>{full_cam.size(2), full_cam.size(3)})
                                                        .mode(torch::kBilinear)
                                                        .align_corners(false));
  }
  out.l_re = reconstruction_loss(full_cam, out.merged_cam, labels);
  return out;
}

}  // namespace msabn::puzzle
