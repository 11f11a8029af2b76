#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "molsmooth/config.hpp"
#include "molsmooth/motion.hpp"
#include "molsmooth/scene.hpp"

namespace molsmooth {

enum class GmsLevel { off, on };

inline double tau_of(GmsLevel g) noexcept { return g == GmsLevel::on ? 1.0 : 0.0; }

/// One cell of the 2 (geometric smoothing) x 5 (trail length) design with a
/// sampled ground-truth speed level and everything needed to render it.
struct StimulusCondition {
  GmsLevel gms = GmsLevel::off;
  int vms_trail = 0;
  int speed_level = 1;  ///< 1-based
  std::uint64_t seed = 0;
  ReactionScript reaction{};

  /// Directory-safe label, e.g. "gms1_trail2_speed3".
  std::string name() const;
};

/// Ground-truth speed level as percentage between slowest (0) and fastest
/// (100) level.
double speed_percent(int speed_level, int level_count);

/// Reaction between two partners of `population`, drawn from `seed`: start
/// frame uniform in the configured window, target uniform in the central
/// box region, bond offset in the image plane.
ReactionScript sample_reaction(const ExperimentConfig& config, const ScenePopulation& population,
                               std::uint64_t seed);

/// The full design in presentation order: one condition per (GMS, trail)
/// cell, order permuted by `seed`, speed level uniform per condition.
std::vector<StimulusCondition> condition_matrix(std::uint64_t seed,
                                                const ExperimentConfig& config = {});

// ---- speed perception --------------------------------------------------

enum class SpeedMode { baseline, gms, vms_trail2 };

/// Linear fit of estimated speed (percent) against ground-truth speed
/// (percent) from the user study.
struct SpeedModel {
  SpeedMode mode;
  double intercept;
  double slope;

  /// intercept + slope * s without a range check; values outside [0, 100]
  /// extrapolate the fit beyond the measured speed range.
  double extrapolate(double s) const noexcept;
};

SpeedModel speed_model(SpeedMode mode) noexcept;
SpeedMode parse_speed_mode(const std::string& name);
const char* to_string(SpeedMode mode) noexcept;

/// es = intercept + slope * s. Throws InvalidInput unless 0 <= s <= 100.
double estimated_speed(double s, const SpeedModel& model);

/// Ground-truth speed that makes a trail-length-2 animation appear as fast
/// as an unsmoothed one at speed s: cs = 1.5 (s + 1).
double compensate_speed(double s);

/// Default settings for animators: moderate trails, geometric smoothing
/// only for fast scenes, speed raised to offset the blur slow-down.
struct Recommendation {
  int trail_length;
  GmsLevel gms;
  double compensated_speed;
};
Recommendation recommend(double s);

/// Blur calibration for one speed level and smoothing factor: the Monte
/// Carlo mean displacement and the resulting window per trail length.
struct Calibration {
  double speed = 0.0;
  double tau = 0.0;
  double d_mol = 0.0;
  double mean_displacement = 0.0;
  std::vector<std::pair<int, int>> windows;  ///< (trail length, n_window)
};
Calibration calibrate(const ExperimentConfig& config, int speed_level, double tau,
                      std::uint64_t seed);

// ---- stimulus generation -----------------------------------------------

struct PhaseFrames {
  std::int64_t attract_start;
  std::int64_t bond_start;
  std::int64_t bond_end;
  std::int64_t repulse_end;
};

struct StimulusManifest {
  std::string name;
  StimulusCondition condition;
  ExperimentConfig config;
  double speed = 0.0;           ///< noise units per second
  double tau = 0.0;
  double d_mol = 0.0;
  double mean_displacement = 0.0;
  int n_window = 1;
  int type_a = 0;
  int type_b = 0;
  Rgb8 color_a;
  Rgb8 color_b;
  PhaseFrames render_phases{};  ///< at render_fps
  PhaseFrames output_phases{};  ///< at output_fps
  bool reactants_in_view = false;
  std::uint32_t render_frames = 0;
  std::vector<std::string> frame_hashes;  ///< one per output frame
};

void to_json(nlohmann::json& j, const StimulusManifest& m);
/// Throws ConfigError on a missing or unsupported schema.
void from_json(const nlohmann::json& j, StimulusManifest& m);

inline constexpr const char* kManifestSchema = "molsmooth.stimulus/1";
inline constexpr const char* kIndexSchema = "molsmooth.batch/1";

struct GenerateOptions {
  bool write_frames = true;   ///< false: compute hashes only
  bool write_layers = false;  ///< also dump both 120 fps layers (large)
  unsigned threads = 0;       ///< 0 = hardware concurrency
  bool run_encoder = true;
};

/// Population and context motion a stimulus is rendered from. The reaction
/// partners of `condition` become the population's focus pair.
struct StimulusScene {
  ScenePopulation population;
  BrownianMotion context;
};
StimulusScene stimulus_scene(const ExperimentConfig& config, const StimulusCondition& condition);

/// Everything about a stimulus that can be computed without rendering.
StimulusManifest plan_stimulus(const ExperimentConfig& config, const StimulusCondition& condition);

/// Renders both layers at render_fps, blurs the context layer, composites,
/// decimates to output_fps and writes frames plus manifest.json into
/// `out_dir`. Deterministic in (config, condition) for any thread count.
StimulusManifest generate_stimulus(const ExperimentConfig& config,
                                   const StimulusCondition& condition,
                                   const std::filesystem::path& out_dir,
                                   const GenerateOptions& options = {});

/// Scene positions of every molecule at time t.
std::vector<Vec3> molecule_positions(const ScenePopulation& population,
                                     const BrownianMotion& context,
                                     const ReactionScript& reaction, double t);

/// True if both partners stay inside the scene box over the reaction.
bool reactants_in_view(const ExperimentConfig& config, const StimulusCondition& condition);

struct BatchOptions {
  bool dry_run = false;
  GenerateOptions generate{};
};

/// Generates the whole condition matrix under `out_root` and writes
/// index.json. With dry_run only the index is written.
nlohmann::json batch(const ExperimentConfig& config, const std::filesystem::path& out_root,
                     const BatchOptions& options = {});

/// Regenerates a stimulus from its manifest (hashes only) and returns the
/// indices of output frames whose hash differs.
std::vector<std::size_t> verify_manifest(const StimulusManifest& manifest, unsigned threads = 0);

}  // namespace molsmooth
