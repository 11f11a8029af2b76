#include "molsmooth/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <regex>
#include <string>

#include "molsmooth/error.hpp"

namespace molsmooth {

namespace fs = std::filesystem;

FrameFormat parse_frame_format(const std::string& name) {
  if (name == "png") return FrameFormat::png;
  if (name == "ppm") return FrameFormat::ppm;
  throw ConfigError("unknown frame format '" + name + "' (expected png or ppm)");
}

const char* to_string(FrameFormat format) noexcept {
  return format == FrameFormat::png ? "png" : "ppm";
}

std::string frame_filename(std::size_t index, FrameFormat format) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06zu.%s", index, to_string(format));
  return buf;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_file(const fs::path& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

void check_shape(const fs::path& path, const Image8& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.bytes.size() != static_cast<std::size_t>(image.width) * image.height * 3)
    throw IoError("inconsistent image buffer for " + path.string());
}

}  // namespace

void write_png(const fs::path& path, const Image8& image, int png_level) {
  check_shape(path, image);
  File file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed for " + path.string());
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encode failed for " + path.string());
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, std::clamp(png_level, 0, 9));
  png_set_filter(png, 0, PNG_FILTER_SUB);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_sRGB(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  for (int y = 0; y < image.height; ++y)
    png_write_row(png, const_cast<png_bytep>(image.bytes.data() + y * stride));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError("write failed for " + path.string());
}

void write_ppm(const fs::path& path, const Image8& image) {
  check_shape(path, image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.bytes.data()),
            static_cast<std::streamsize>(image.bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_image(const fs::path& path, const Image8& image, FrameFormat format, int png_level) {
  if (format == FrameFormat::png)
    write_png(path, image, png_level);
  else
    write_ppm(path, image);
}

namespace {

Image8 read_png(const fs::path& path) {
  File file = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed for " + path.string());
  png_infop info = png_create_info_struct(png);
  Image8 image;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("PNG decode failed for " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  image.width = static_cast<int>(png_get_image_width(png, info));
  image.height = static_cast<int>(png_get_image_height(png, info));
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  if (png_get_rowbytes(png, info) != stride) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unsupported PNG layout in " + path.string());
  }
  image.bytes.resize(stride * image.height);
  for (int y = 0; y < image.height; ++y) png_read_row(png, image.bytes.data() + y * stride, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

Image8 read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  auto token = [&]() {
    std::string t;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
      } else {
        t.push_back(c);
      }
    }
    return t;
  };
  if (token() != "P6") throw IoError("not a binary PPM: " + path.string());
  Image8 image;
  int maxval = 0;
  try {
    image.width = std::stoi(token());
    image.height = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw IoError("malformed PPM header in " + path.string());
  }
  if (image.width <= 0 || image.height <= 0 || maxval != 255)
    throw IoError("unsupported PPM (need 8-bit) in " + path.string());
  image.bytes.resize(static_cast<std::size_t>(image.width) * image.height * 3);
  in.read(reinterpret_cast<char*>(image.bytes.data()),
          static_cast<std::streamsize>(image.bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.bytes.size()))
    throw IoError("truncated PPM " + path.string());
  return image;
}

}  // namespace

Image8 read_image(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm") return read_ppm(path);
  throw IoError("unsupported image extension: " + path.string());
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  static const std::regex pattern(R"(frame_\d{6}\.(png|ppm))");
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw IoError("cannot read directory " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : it)
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), pattern))
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace molsmooth
