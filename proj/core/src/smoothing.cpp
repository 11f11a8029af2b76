#include "molsmooth/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "molsmooth/error.hpp"

namespace molsmooth {

namespace {

constexpr double kFixedScale = 0x1.0p40;
constexpr double kMaxWindow = 1.0e6;
constexpr std::size_t kRowsPerChunk = 16;

template <typename Fn>
void for_rows(ThreadPool* pool, int height, Fn&& fn) {
  const auto rows = static_cast<std::size_t>(height);
  if (pool == nullptr) {
    fn(std::size_t{0}, rows);
    return;
  }
  pool->for_each_chunk(rows, kRowsPerChunk, fn);
}

}  // namespace

void TrailSpec::validate() const {
  if (trail_length < 0 || trail_length > 4)
    throw InvalidInput("trail length must lie in 0..4, got " + std::to_string(trail_length));
}

void EchoParams::validate() const {
  if (n_window < 1 || n_window % 2 == 0)
    throw InvalidInput("echo window must be odd and >= 1, got " + std::to_string(n_window));
}

EchoParams window_size(TrailSpec trail, double d_mol, double mean_displacement) {
  trail.validate();
  if (trail.trail_length == 0) return {1};
  if (!std::isfinite(mean_displacement) || mean_displacement <= 0.0)
    throw CalibrationError("mean per-frame displacement must be positive");
  if (!std::isfinite(d_mol) || d_mol <= 0.0)
    throw CalibrationError("molecule diameter must be positive");
  const double frames = trail.trail_length * d_mol / mean_displacement;
  if (frames > kMaxWindow)
    throw CalibrationError("mean displacement too small, window of " + std::to_string(frames) +
                           " frames");
  // Slack keeps exact ties (e.g. 20 -> 21) from flipping on rounding noise.
  return {2 * static_cast<int>(std::floor(frames / 2.0 + 1e-9)) + 1};
}

inline std::int64_t to_fixed(float v) noexcept {
  return static_cast<std::int64_t>(static_cast<double>(v) * kFixedScale);
}

FrameAccumulator::FrameAccumulator(int width, int height, RgbF base)
    : width_(width),
      height_(height),
      base_{to_fixed(base.r), to_fixed(base.g), to_fixed(base.b)},
      sum_(static_cast<std::size_t>(width) * height * 3, 0) {
  if (width <= 0 || height <= 0) throw InvalidInput("accumulator dimensions must be positive");
}

void FrameAccumulator::clear() noexcept {
  std::fill(sum_.begin(), sum_.end(), 0);
  total_ = 0;
}

void FrameAccumulator::add(const FrameBuffer& frame, std::int64_t weight, ThreadPool* pool,
                           const Coverage* coverage) {
  if (frame.width() != width_ || frame.height() != height_)
    throw InvalidInput("frame size does not match accumulator");
  if (coverage != nullptr && coverage->size() != static_cast<std::size_t>(height_))
    throw InvalidInput("coverage must hold one span per row");
  const std::size_t stride = static_cast<std::size_t>(width_) * 3;
  const std::int64_t b0 = base_[0], b1 = base_[1], b2 = base_[2];
  auto add_span = [&](std::size_t y, std::size_t x0, std::size_t x1) {
    const float* src = frame.row(static_cast<int>(y));
    std::int64_t* dst = sum_.data() + y * stride;
    for (std::size_t i = 3 * x0; i < 3 * x1; i += 3) {
      dst[i] += weight * (to_fixed(src[i]) - b0);
      dst[i + 1] += weight * (to_fixed(src[i + 1]) - b1);
      dst[i + 2] += weight * (to_fixed(src[i + 2]) - b2);
    }
  };
  if (coverage == nullptr) {
    for_rows(pool, height_, [&](std::size_t y0, std::size_t y1) {
      for (std::size_t y = y0; y < y1; ++y) add_span(y, 0, static_cast<std::size_t>(width_));
    });
  } else {
    // Sparse rows are cheap; threading them costs more than it saves.
    for (std::size_t y = 0; y < coverage->size(); ++y) {
      const RowSpan s = (*coverage)[y];
      if (!s.empty())
        add_span(y, static_cast<std::size_t>(std::max(0, s.begin)),
                 static_cast<std::size_t>(std::min(width_, s.end)));
    }
  }
  total_ += weight;
}

void FrameAccumulator::mean(std::int64_t count, FrameBuffer& out, ThreadPool* pool) const {
  if (count <= 0) throw InvalidInput("mean needs a positive count");
  if (out.width() != width_ || out.height() != height_) out = FrameBuffer(width_, height_);
  const double denom = static_cast<double>(count) * kFixedScale;
  const std::size_t stride = static_cast<std::size_t>(width_) * 3;
  const std::int64_t offset[3] = {total_ * base_[0], total_ * base_[1], total_ * base_[2]};
  for_rows(pool, height_, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y) {
      const std::int64_t* src = sum_.data() + y * stride;
      float* dst = out.row(static_cast<int>(y));
      for (std::size_t i = 0; i < stride; i += 3)
        for (std::size_t c = 0; c < 3; ++c)
          dst[i + c] = static_cast<float>(static_cast<double>(src[i + c] + offset[c]) / denom);
    }
  });
}

SlidingEcho::SlidingEcho(std::size_t frame_count, EchoParams params, Fetch fetch,
                         ThreadPool* pool, RgbF base)
    : frame_count_(frame_count),
      params_(params),
      fetch_(std::move(fetch)),
      pool_(pool),
      base_(base) {
  params_.validate();
  if (frame_count == 0) throw InvalidInput("echo needs at least one frame");
}

std::size_t SlidingEcho::clamp_index(std::int64_t i) const noexcept {
  const auto last = static_cast<std::int64_t>(frame_count_) - 1;
  return static_cast<std::size_t>(std::clamp<std::int64_t>(i, 0, last));
}

void SlidingEcho::step() {
  if (params_.n_window == 1) return;
  const std::int64_t h = params_.half();
  const auto t = static_cast<std::int64_t>(next_);
  if (!primed_) {
    const EchoInput first = fetch_(0);
    acc_.emplace(first.frame->width(), first.frame->height(), base_);
    acc_->add(*first.frame, h + 1, pool_, first.coverage);
    for (std::int64_t k = 1; k <= h; ++k) {
      const EchoInput in = fetch_(clamp_index(k));
      acc_->add(*in.frame, 1, pool_, in.coverage);
    }
    primed_ = true;
    return;
  }
  const std::size_t incoming = clamp_index(t + h);
  const std::size_t outgoing = clamp_index(t - h - 1);
  if (incoming == outgoing) return;
  const EchoInput in = fetch_(incoming);
  acc_->add(*in.frame, 1, pool_, in.coverage);
  const EchoInput out = fetch_(outgoing);
  acc_->subtract(*out.frame, pool_, out.coverage);
}

void SlidingEcho::next(FrameBuffer& out) {
  if (done()) throw InvalidInput("echo sequence exhausted");
  step();
  if (params_.n_window == 1)
    out = *fetch_(next_).frame;
  else
    acc_->mean(params_.n_window, out, pool_);
  ++next_;
}

void SlidingEcho::skip() {
  if (done()) throw InvalidInput("echo sequence exhausted");
  step();
  ++next_;
}

std::vector<FrameBuffer> echo(std::span<const FrameBuffer> frames, EchoParams params,
                              ThreadPool* pool) {
  params.validate();
  if (frames.empty()) throw InvalidInput("echo needs at least one frame");
  for (const FrameBuffer& f : frames)
    if (!f.same_shape(frames.front())) throw InvalidInput("echo frames differ in size");
  SlidingEcho stream(
      frames.size(), params, [&](std::size_t i) { return EchoInput(frames[i]); }, pool);
  std::vector<FrameBuffer> out(frames.size());
  for (auto& f : out) stream.next(f);
  return out;
}

float screen(float a, float b) noexcept {
  const float hi = std::max(a, b);
  const float lo = std::min(a, b);
  return std::min(1.0f, hi + lo * (1.0f - hi));
}

void screen_blend_into(FrameBuffer& dst, const FrameBuffer& src, ThreadPool* pool) {
  if (!dst.same_shape(src)) throw InvalidInput("screen blend of differently sized frames");
  const std::size_t stride = static_cast<std::size_t>(dst.width()) * 3;
  for_rows(pool, dst.height(), [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y) {
      float* d = dst.row(static_cast<int>(y));
      const float* s = src.row(static_cast<int>(y));
      for (std::size_t i = 0; i < stride; ++i) d[i] = screen(d[i], s[i]);
    }
  });
}

FrameBuffer screen_blend(const FrameBuffer& a, const FrameBuffer& b) {
  FrameBuffer out = a;
  screen_blend_into(out, b);
  return out;
}

std::vector<std::string> composite_directories(const std::filesystem::path& context_dir,
                                               const std::filesystem::path& focus_dir,
                                               const std::filesystem::path& out_dir,
                                               EchoParams params, std::size_t decimation,
                                               FrameFormat format, int png_level,
                                               ThreadPool* pool) {
  params.validate();
  if (decimation == 0) throw InvalidInput("decimation factor must be >= 1");
  const auto context = list_frames(context_dir);
  const auto focus = list_frames(focus_dir);
  if (context.empty()) throw InvalidInput("no frames in " + context_dir.string());
  if (context.size() != focus.size())
    throw InvalidInput("layer directories hold different frame counts");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory " + out_dir.string());

  const FrameBuffer first = from_srgb8(read_image(context.front()));
  const FrameBuffer last = from_srgb8(read_image(context.back()));
  FrameBuffer scratch;
  auto fetch = [&](std::size_t i) -> EchoInput {
    if (i == 0) return first;
    if (i + 1 == context.size()) return last;
    scratch = from_srgb8(read_image(context[i]));
    if (!scratch.same_shape(first)) throw InvalidInput("frame size differs: " + context[i].string());
    return scratch;
  };
  SlidingEcho stream(context.size(), params, fetch, pool);
  std::vector<std::string> hashes;
  FrameBuffer out;
  for (std::size_t t = 0; t < context.size(); ++t) {
    if (t % decimation != 0) {
      stream.skip();
      continue;
    }
    stream.next(out);
    const FrameBuffer front = from_srgb8(read_image(focus[t]));
    if (!front.same_shape(out)) throw InvalidInput("frame size differs: " + focus[t].string());
    screen_blend_into(out, front, pool);
    const Image8 image = to_srgb8(out);
    hashes.push_back(hash_hex(hash_image(image)));
    write_image(out_dir / frame_filename(t / decimation, format), image, format, png_level);
  }
  return hashes;
}

}  // namespace molsmooth
