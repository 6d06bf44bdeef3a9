#include "ot/image.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <fmt/core.h>

namespace ot {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image load_png(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError(fmt::format("cannot open {}", path));

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  std::vector<png_bytep> row_ptrs;
  Image img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(fmt::format("{} is not a readable PNG", path));
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  // Normalize every color layout to 8-bit RGB.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
      png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_read_update_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.rgb.resize(static_cast<size_t>(3) * img.width * img.height);
  row_ptrs.resize(static_cast<size_t>(img.height));
  for (int y = 0; y < img.height; ++y) {
    row_ptrs[static_cast<size_t>(y)] = img.rgb.data() + static_cast<size_t>(3) * img.width * y;
  }
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

int read_ppm_token(std::istream& is) {
  // Whitespace-separated decimal with '#' comments, as the format allows.
  for (;;) {
    int c = is.peek();
    if (c == '#') {
      std::string line;
      std::getline(is, line);
    } else if (std::isspace(c)) {
      is.get();
    } else {
      break;
    }
  }
  int value = -1;
  is >> value;
  if (!is || value < 0) throw IoError("malformed PPM header");
  return value;
}

Image load_ppm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(fmt::format("cannot open {}", path));
  char magic[2] = {0, 0};
  is.read(magic, 2);
  const bool binary = magic[0] == 'P' && magic[1] == '6';
  const bool ascii = magic[0] == 'P' && magic[1] == '3';
  if (!binary && !ascii) throw IoError(fmt::format("{} is not a P6/P3 PPM", path));

  Image img;
  img.width = read_ppm_token(is);
  img.height = read_ppm_token(is);
  const int maxval = read_ppm_token(is);
  if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 65535) {
    throw IoError(fmt::format("bad PPM geometry in {}", path));
  }
  const size_t count = static_cast<size_t>(3) * img.width * img.height;
  img.rgb.resize(count);

  if (binary) {
    is.get();  // single whitespace after maxval
    if (maxval < 256) {
      is.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(count));
      if (static_cast<size_t>(is.gcount()) != count) throw IoError("truncated PPM data");
    } else {
      for (size_t i = 0; i < count; ++i) {
        unsigned char hi, lo;
        if (!is.get(reinterpret_cast<char&>(hi)) || !is.get(reinterpret_cast<char&>(lo))) {
          throw IoError("truncated PPM data");
        }
        img.rgb[i] = static_cast<std::uint8_t>(((hi << 8 | lo) * 255) / maxval);
      }
    }
  } else {
    for (size_t i = 0; i < count; ++i) {
      const int value = read_ppm_token(is);
      if (value > maxval) throw IoError("PPM sample exceeds maxval");
      img.rgb[i] = static_cast<std::uint8_t>(maxval == 255 ? value : value * 255 / maxval);
    }
  }
  return img;
}

}  // namespace

Image load_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError(fmt::format("cannot open {}", path));
  unsigned char sig[8] = {0};
  probe.read(reinterpret_cast<char*>(sig), 8);
  probe.close();
  if (png_sig_cmp(sig, 0, 8) == 0) return load_png(path);
  if (sig[0] == 'P' && (sig[1] == '6' || sig[1] == '3')) return load_ppm(path);
  throw IoError(fmt::format("{}: unknown image format (PNG and PPM supported)", path));
}

void save_png(const std::string& path, const Image& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.rgb.size() != static_cast<size_t>(3) * img.width * img.height) {
    throw OtError("save_png: inconsistent image");
  }
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError(fmt::format("cannot write {}", path));
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(fmt::format("PNG write to {} failed", path));
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.rgb.data() +
                                             static_cast<size_t>(3) * img.width * y));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_ppm(const std::string& path, const Image& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(fmt::format("cannot write {}", path));
  os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.rgb.data()),
           static_cast<std::streamsize>(img.rgb.size()));
  if (!os) throw IoError(fmt::format("short write to {}", path));
}

}  // namespace ot
