#pragma once

#include <filesystem>

#include "msabn/core/dataset.hpp"
#include "msabn/harness/overlay.hpp"
#include "msabn/model/msabn.hpp"

namespace msabn::harness {

/// Writes images/<id>.png, overlays/<id>.png and manifest.json under `out_dir`. Attention is
/// upsampled to image size before blending; frac_out is filled for samples with a box.
OverlayManifest export_overlays(model::MsabnNet& net, const Dataset& dataset, const std::filesystem::path& out_dir,
                                double threshold = 0.2);

}  // namespace msabn::harness
