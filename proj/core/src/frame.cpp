#include "molsmooth/frame.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <vector>

#include "molsmooth/error.hpp"

namespace molsmooth {

FrameBuffer::FrameBuffer(int width, int height, RgbF fill_color)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw InvalidInput("frame dimensions must be positive");
  data_.resize(pixel_count() * 3);
  fill(fill_color);
}

void FrameBuffer::fill(RgbF c) noexcept {
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = c.r;
    data_[i + 1] = c.g;
    data_[i + 2] = c.b;
  }
}

double srgb_encode(double x) noexcept {
  x = std::clamp(x, 0.0, 1.0);
  return x <= 0.0031308 ? 12.92 * x : 1.055 * std::pow(x, 1.0 / 2.4) - 0.055;
}

double srgb_decode(double e) noexcept {
  e = std::clamp(e, 0.0, 1.0);
  return e <= 0.04045 ? e / 12.92 : std::pow((e + 0.055) / 1.055, 2.4);
}

namespace {

// thresholds[k] is the smallest linear value that encodes to code k + 1.
const std::array<double, 255>& encode_thresholds() {
  static const auto table = [] {
    std::array<double, 255> t{};
    for (int k = 0; k < 255; ++k) t[k] = srgb_decode((k + 0.5) / 255.0);
    return t;
  }();
  return table;
}

// Positive floats below 1 bucketed by their top bits; each entry is the code of the bucket's
// smallest value, so a short forward scan over the thresholds finishes the lookup.
constexpr int kBucketShift = 15;
constexpr std::uint32_t kOneBits = 0x3F800000u;

const std::vector<std::uint8_t>& bucket_codes() {
  static const auto table = [] {
    const auto& t = encode_thresholds();
    std::vector<std::uint8_t> codes((kOneBits >> kBucketShift) + 1);
    std::size_t code = 0;
    for (std::uint32_t k = 0; k < codes.size(); ++k) {
      const double v = std::bit_cast<float>(k << kBucketShift);
      while (code < t.size() && v >= t[code]) ++code;
      codes[k] = static_cast<std::uint8_t>(code);
    }
    return codes;
  }();
  return table;
}

inline std::uint8_t encode_with(float linear, const std::array<double, 255>& t,
                                const std::uint8_t* codes) noexcept {
  if (!(linear > 0.0f)) return 0;
  if (linear >= 1.0f) return 255;
  std::size_t code = codes[std::bit_cast<std::uint32_t>(linear) >> kBucketShift];
  const double v = linear;
  while (code < t.size() && v >= t[code]) ++code;
  return static_cast<std::uint8_t>(code);
}

const std::array<float, 256>& decode_table() {
  static const auto table = [] {
    std::array<float, 256> t{};
    for (int k = 0; k < 256; ++k) t[k] = static_cast<float>(srgb_decode(k / 255.0));
    return t;
  }();
  return table;
}

}  // namespace

std::uint8_t linear_to_srgb8(float linear) noexcept {
  return encode_with(linear, encode_thresholds(), bucket_codes().data());
}

float srgb8_to_linear(std::uint8_t code) noexcept { return decode_table()[code]; }

Image8 to_srgb8(const FrameBuffer& frame) {
  Image8 img{frame.width(), frame.height(), {}};
  const auto src = frame.channels();
  img.bytes.resize(src.size());
  const auto& t = encode_thresholds();
  const std::uint8_t* codes = bucket_codes().data();
  std::transform(src.begin(), src.end(), img.bytes.begin(),
                 [&](float v) { return encode_with(v, t, codes); });
  return img;
}

FrameBuffer from_srgb8(const Image8& image) {
  FrameBuffer frame(image.width, image.height);
  if (image.bytes.size() != frame.channels().size())
    throw InvalidInput("image byte count does not match its dimensions");
  auto dst = frame.channels();
  std::transform(image.bytes.begin(), image.bytes.end(), dst.begin(),
                 [](std::uint8_t b) { return srgb8_to_linear(b); });
  return frame;
}

std::uint64_t hash_image(const Image8& image) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  auto feed = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001B3ull;
  };
  for (int shift = 0; shift < 32; shift += 8) feed(static_cast<std::uint8_t>(image.width >> shift));
  for (int shift = 0; shift < 32; shift += 8) feed(static_cast<std::uint8_t>(image.height >> shift));
  for (std::uint8_t b : image.bytes) feed(b);
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace molsmooth
