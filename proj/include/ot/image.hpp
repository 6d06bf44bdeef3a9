#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ot/types.hpp"

namespace ot {

// 8-bit RGB raster, row-major, no padding.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 * width * height

  int pixel_count() const { return width * height; }
  const std::uint8_t* px(int idx) const { return rgb.data() + 3 * idx; }
  std::uint8_t* px(int idx) { return rgb.data() + 3 * idx; }
};

// Sniffs the magic bytes: PNG signature or PPM P6 / P3. Grayscale and
// alpha PNGs are expanded to plain RGB; 16-bit channels are narrowed.
Image load_image(const std::string& path);

void save_png(const std::string& path, const Image& img);
void save_ppm(const std::string& path, const Image& img);  // binary P6

}  // namespace ot
