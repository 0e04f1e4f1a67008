#pragma once

#include <span>

#include <torch/torch.h>

#include "msabn/model/msabn.hpp"

namespace msabn::puzzle {

/// 2x2 non-overlapping tiles of a batch. Tile 4*b + t belongs to image b, with t in
/// (top-left, top-right, bottom-left, bottom-right) order.
struct TileBatch {
  torch::Tensor tiles;  // 4B x C x H/2 x W/2
  int64_t batch = 0;
};

/// Throws ValidationError when H or W is odd.
TileBatch tile(const torch::Tensor& images);

/// Inverse of `tile`: B x C x H x W.
torch::Tensor reassemble(const TileBatch& tiles);

/// Merges the four tile maps of one image (each K x h x w) into K x 2h x 2w.
/// Throws ValidationError naming the first tile whose shape differs from tile 0.
torch::Tensor merge(std::span<const torch::Tensor> tile_maps);

/// Batched merge: 4B x K x h x w -> B x K x 2h x 2w, same tile order as `tile`.
torch::Tensor merge_batch(const torch::Tensor& tile_maps);

/// Mean absolute difference between the two maps on each sample's target-class channel,
/// averaged over batch and spatial positions.
torch::Tensor reconstruction_loss(const torch::Tensor& cam_full, const torch::Tensor& cam_merged,
                                  const torch::Tensor& labels);

struct PuzzleOutput {
  model::ForwardOutput full;
  torch::Tensor merged_cam;
  torch::Tensor l_re;
};

/// Runs the network on the images and on their tiles with shared weights, merges the tile
/// CAMs and scores them against the full-image CAM. The merged map is bilinearly resized
/// to the full CAM size if a backbone makes them differ.
PuzzleOutput puzzle_forward(model::MsabnNet& net, const torch::Tensor& images, const torch::Tensor& labels);

}  // namespace msabn::puzzle
