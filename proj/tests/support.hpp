#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "msabn/core/dataset.hpp"
#include "msabn/core/image.hpp"

namespace msabn::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("msabn_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline Image random_image(int h, int w, int c, std::mt19937_64& rng) {
  Image img(h, w, c);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(d(rng));
  return img;
}

inline BBox random_box(int w, int h, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dx(0, w - 1), dy(0, h - 1);
  int x0 = dx(rng), x1 = dx(rng), y0 = dy(rng), y1 = dy(rng);
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  return BBox{x0, y0, x1 + 1, y1 + 1};
}

}  // namespace msabn::test
