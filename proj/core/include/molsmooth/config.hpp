#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "molsmooth/image_io.hpp"
#include "molsmooth/noise.hpp"
#include "molsmooth/render.hpp"
#include "molsmooth/scene.hpp"

namespace molsmooth {

struct MotionConfig {
  /// Noise-domain speed per ground-truth speed level, slowest first. The
  /// defaults are linearly increasing and meant to be tuned per project.
  std::vector<double> speed_levels{0.05, 0.10, 0.15, 0.20};
  std::int64_t component_stride = 1'000'003;
  std::int64_t molecule_stride = 101;
  NoiseKernel kernel = NoiseKernel::quintic;
};

struct ReactionConfig {
  double start_min_s = 5.0;
  double start_max_s = 10.0;
  double attract_s = 5.0;
  double bond_s = 1.0;
  double repulse_s = 5.0;
  /// Reaction targets are drawn from this central fraction of the box.
  double target_fraction = 0.6;
  /// Centre distance of the bonded pair, in units of their mean diameter.
  double bond_distance = 0.9;
};

struct RenderConfig {
  int width = 1024;
  int height = 576;
  RenderSettings shading{};
};

struct SmoothingConfig {
  /// Visual smoothing levels of the design, in molecule diameters.
  std::vector<int> trail_lengths{0, 1, 2, 3, 4};
};

struct HarnessConfig {
  std::uint64_t seed = 20220601;
  double duration_s = 20.0;
  int render_fps = 120;
  int output_fps = 30;
  std::string out_dir = "stimuli";
  FrameFormat frame_format = FrameFormat::png;
  int png_level = 1;
  /// Optional shell command run after a stimulus is written. "{dir}" and
  /// "{fps}" are substituted. Empty = frames only.
  std::string encoder_command;
  /// Molecules sampled for the displacement estimate; 0 = whole population.
  std::uint32_t calibration_molecules = 0;
};

struct ExperimentConfig {
  SceneConfig scene{};
  MotionConfig motion{};
  ReactionConfig reaction{};
  RenderConfig render{};
  SmoothingConfig smoothing{};
  HarnessConfig harness{};

  /// Throws ConfigError describing the first invalid field.
  void validate() const;

  std::uint32_t render_frame_count() const;
  int decimation_factor() const { return harness.render_fps / harness.output_fps; }
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
/// Missing keys keep their defaults. Throws ConfigError on malformed values.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

/// Reads and validates a JSON config file. Throws IoError / ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace molsmooth
