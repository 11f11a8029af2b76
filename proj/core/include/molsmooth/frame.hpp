#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace molsmooth {

struct RgbF {
  float r = 0.0f;
  float g = 0.0f;
  float b = 0.0f;
  friend constexpr bool operator==(RgbF, RgbF) noexcept = default;
};

/// Linear-light RGB raster, channel-interleaved, row-major from the top.
class FrameBuffer {
public:
  FrameBuffer() = default;
  FrameBuffer(int width, int height, RgbF fill = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  bool same_shape(const FrameBuffer& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  RgbF at(int x, int y) const noexcept {
    const float* p = &data_[index(x, y)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, RgbF c) noexcept {
    float* p = &data_[index(x, y)];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
  void fill(RgbF c) noexcept;

  std::span<float> channels() noexcept { return data_; }
  std::span<const float> channels() const noexcept { return data_; }
  float* row(int y) noexcept { return data_.data() + static_cast<std::size_t>(y) * width_ * 3; }
  const float* row(int y) const noexcept {
    return data_.data() + static_cast<std::size_t>(y) * width_ * 3;
  }

  friend bool operator==(const FrameBuffer&, const FrameBuffer&) = default;

private:
  std::size_t index(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// Pixels [begin, end) of one row that may differ from the frame's background.
struct RowSpan {
  int begin = 0;
  int end = 0;
  bool empty() const noexcept { return end <= begin; }
};
/// One RowSpan per row.
using Coverage = std::vector<RowSpan>;

/// 8-bit sRGB-encoded RGB image as written to disk.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bytes;  ///< width * height * 3
};

/// sRGB transfer function, linear [0,1] -> encoded [0,1].
double srgb_encode(double linear) noexcept;
double srgb_decode(double encoded) noexcept;

/// Nearest 8-bit sRGB code for a linear value; clamps to [0, 1].
std::uint8_t linear_to_srgb8(float linear) noexcept;
float srgb8_to_linear(std::uint8_t code) noexcept;

Image8 to_srgb8(const FrameBuffer& frame);
FrameBuffer from_srgb8(const Image8& image);

/// FNV-1a 64 over the image dimensions and bytes.
std::uint64_t hash_image(const Image8& image) noexcept;
std::string hash_hex(std::uint64_t hash);

}  // namespace molsmooth
