#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include "msabn/core/annotation.hpp"
#include "msabn/harness/overlay.hpp"

namespace httplib {
class Server;
}

namespace msabn::harness {

/// HTTP front for the annotation loop.
///
///   GET  /samples?sort=frac_out_desc|wrong_first&page=0&page_size=50
///   GET  /samples/{id}/overlay        PNG bytes
///   POST /samples/{id}/bbox           {"x_min","y_min","x_max","y_max","author"} -> 201 record
///   GET  /annotations                 annotation store as JSONL
///
/// Boxes are validated against the image size recorded in the manifest; violations answer
/// 422 with per-field messages, unknown ids 404.
class AnnotationService {
public:
  AnnotationService(OverlayManifest manifest, std::filesystem::path manifest_dir, AnnotationStore& store);
  ~AnnotationService();

  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  /// Binds to `port` (0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  /// bind + listen on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

private:
  void routes();

  OverlayManifest manifest_;
  std::filesystem::path manifest_dir_;
  AnnotationStore& store_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace msabn::harness
