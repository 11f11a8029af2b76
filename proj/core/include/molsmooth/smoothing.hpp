#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "molsmooth/frame.hpp"
#include "molsmooth/image_io.hpp"
#include "molsmooth/parallel.hpp"

namespace molsmooth {

/// Motion-blur strength in molecule diameters of world-space trail.
struct TrailSpec {
  int trail_length = 0;  ///< 0..4, 0 disables blur
  void validate() const;
};

/// Echo window: number of frames averaged, centred on the current frame.
struct EchoParams {
  int n_window = 1;  ///< odd, >= 1
  int half() const noexcept { return (n_window - 1) / 2; }
  void validate() const;
};

/// Window size that yields a trail of `trail_length * d_mol` scene units for
/// content moving `mean_displacement` scene units per frame: the odd integer
/// nearest to trail_length * d_mol / mean_displacement (ties round up),
/// at least 1. Throws CalibrationError if the displacement is not positive
/// or the window would be unreasonably large.
EchoParams window_size(TrailSpec trail, double d_mol, double mean_displacement);

/// Exact running sum of linear-light frames.
///
/// Channels are accumulated as 64-bit integers on a 2^-40 grid, so adding
/// and removing frames in any order gives the same sum. Values >= 2^-17
/// (and 0) are represented exactly; smaller values are truncated onto the
/// grid, far below the 8-bit export step.
///
/// Sums are kept relative to a constant `base` colour. Frames that equal the
/// base outside a known Coverage can then be added by visiting only the
/// covered spans, with results identical to a dense add.
class FrameAccumulator {
public:
  FrameAccumulator(int width, int height, RgbF base = {});

  /// sum += weight * frame. With `coverage`, pixels outside it must equal base.
  void add(const FrameBuffer& frame, std::int64_t weight = 1, ThreadPool* pool = nullptr,
           const Coverage* coverage = nullptr);
  void subtract(const FrameBuffer& frame, ThreadPool* pool = nullptr,
                const Coverage* coverage = nullptr) {
    add(frame, -1, pool, coverage);
  }
  void clear() noexcept;

  /// out = sum / count, rounded to float.
  void mean(std::int64_t count, FrameBuffer& out, ThreadPool* pool = nullptr) const;

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  /// Sum of all weights added so far.
  std::int64_t total_weight() const noexcept { return total_; }

private:
  int width_;
  int height_;
  std::int64_t base_[3];
  std::int64_t total_ = 0;
  std::vector<std::int64_t> sum_;  // relative to base
};

/// A frame handed to SlidingEcho, optionally with the span of pixels that
/// differ from the echo's base colour.
struct EchoInput {
  EchoInput(const FrameBuffer& f, const Coverage* c = nullptr) : frame(&f), coverage(c) {}
  const FrameBuffer* frame;
  const Coverage* coverage;
};

/// Streaming centred echo over a sequence of `frame_count` frames.
///
/// Output t is the unweighted mean of inputs clamp(t - h) .. clamp(t + h),
/// h = (n_window - 1) / 2, where clamp() replicates the first/last frame at
/// the sequence ends. Frames are pulled through `fetch(index)`; each output
/// step requests at most two frames, so memory stays at one accumulator
/// regardless of window length. Produces the same outputs as echo().
class SlidingEcho {
public:
  using Fetch = std::function<EchoInput(std::size_t)>;

  /// `base` must match every fetched frame outside its coverage; it is
  /// irrelevant for inputs fetched without coverage.
  SlidingEcho(std::size_t frame_count, EchoParams params, Fetch fetch, ThreadPool* pool = nullptr,
              RgbF base = {});

  /// Index of the next output produced by next().
  std::size_t position() const noexcept { return next_; }
  bool done() const noexcept { return next_ >= frame_count_; }

  /// Moves the window to the next output index and writes that output.
  void next(FrameBuffer& out);
  /// Moves the window forward without materialising the output.
  void skip();

private:
  std::size_t clamp_index(std::int64_t i) const noexcept;
  void step();

  std::size_t frame_count_;
  EchoParams params_;
  Fetch fetch_;
  ThreadPool* pool_;
  RgbF base_;
  std::size_t next_ = 0;
  bool primed_ = false;
  std::optional<FrameAccumulator> acc_;
};

/// Echo effect over an in-memory sequence. Throws InvalidInput on an empty
/// sequence or mismatched frame sizes.
std::vector<FrameBuffer> echo(std::span<const FrameBuffer> frames, EchoParams params,
                              ThreadPool* pool = nullptr);

/// Screen blend per channel: 1 - (1 - a)(1 - b), evaluated as
/// max + min * (1 - max) so black is an exact identity and the result is
/// symmetric in its arguments.
float screen(float a, float b) noexcept;

/// Throws InvalidInput on mismatched sizes.
FrameBuffer screen_blend(const FrameBuffer& a, const FrameBuffer& b);
/// In-place: dst = screen(dst, src).
void screen_blend_into(FrameBuffer& dst, const FrameBuffer& src, ThreadPool* pool = nullptr);

/// Offline pipeline over frame directories: echo on the context layer,
/// screen blend with the focus layer, keep every `decimation`-th frame.
/// Both directories must hold the same number of equally sized frames.
/// Returns the hash of every written frame. Throws IoError / InvalidInput.
std::vector<std::string> composite_directories(const std::filesystem::path& context_dir,
                                               const std::filesystem::path& focus_dir,
                                               const std::filesystem::path& out_dir,
                                               EchoParams params, std::size_t decimation,
                                               FrameFormat format, int png_level = 1,
                                               ThreadPool* pool = nullptr);

/// Keeps elements 0, factor, 2*factor, ...; ceil(size / factor) results.
template <typename T>
std::vector<T> decimate(std::span<const T> frames, std::size_t factor = 4) {
  std::vector<T> out;
  if (factor == 0) factor = 1;
  out.reserve((frames.size() + factor - 1) / factor);
  for (std::size_t i = 0; i < frames.size(); i += factor) out.push_back(frames[i]);
  return out;
}

template <typename T>
std::vector<T> decimate(const std::vector<T>& frames, std::size_t factor = 4) {
  return decimate(std::span<const T>(frames), factor);
}

}  // namespace molsmooth
