#include "png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "ggi/error.hpp"

namespace ggi::detail {

namespace {
struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

void write_png_rgb8(const std::string& path, int width, int height,
                    const std::vector<uint8_t>& rgb) {
  if (rgb.size() != static_cast<size_t>(width) * height * 3) {
    throw Error(Errc::ShapeMismatch, "pixel buffer does not match dimensions");
  }
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error(Errc::Io, "cannot open '" + path + "' for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::Io, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::Io, "libpng write failed for '" + path + "'");
  }
  png_init_io(png, fp.get());
  // Fixed settings keep output byte-reproducible.
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = height - 1; y >= 0; --y) {
    png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<size_t>(y) * width * 3));
  }
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
}

std::vector<uint8_t> read_png_rgb8(const std::string& path, int* width, int* height) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw Error(Errc::Io, "cannot open '" + path + "'");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::Io, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::Io, "libpng read failed for '" + path + "'");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_RGB || depth != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::FormatVersionMismatch, "'" + path + "' is not 8-bit RGB");
  }

  std::vector<uint8_t> rgb(static_cast<size_t>(w) * h * 3);
  for (int row = 0; row < h; ++row) {
    const int y = h - 1 - row;  // undo the writer's vertical flip
    png_read_row(png, rgb.data() + static_cast<size_t>(y) * w * 3, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  *width = w;
  *height = h;
  return rgb;
}

}  // namespace ggi::detail
