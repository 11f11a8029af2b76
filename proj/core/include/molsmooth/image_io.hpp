#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "molsmooth/frame.hpp"

namespace molsmooth {

enum class FrameFormat { png, ppm };

FrameFormat parse_frame_format(const std::string& name);
const char* to_string(FrameFormat format) noexcept;

/// "frame_000042.png" style name for frame `index`.
std::string frame_filename(std::size_t index, FrameFormat format);

/// Writes 8-bit RGB. `png_level` is the zlib level (0-9). Throws IoError.
void write_png(const std::filesystem::path& path, const Image8& image, int png_level = 1);
void write_ppm(const std::filesystem::path& path, const Image8& image);
void write_image(const std::filesystem::path& path, const Image8& image, FrameFormat format,
                 int png_level = 1);

/// Reads 8-bit RGB PNG or binary PPM (P6, maxval 255); format chosen by
/// extension. Throws IoError.
Image8 read_image(const std::filesystem::path& path);

/// Sorted `frame_NNNNNN.{png,ppm}` files in `dir`. Throws IoError if the
/// directory cannot be read.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

}  // namespace molsmooth
