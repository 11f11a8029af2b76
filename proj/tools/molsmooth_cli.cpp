// molsmooth: stimulus generation, blur calibration and speed compensation.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "molsmooth/config.hpp"
#include "molsmooth/error.hpp"
#include "molsmooth/harness.hpp"
#include "molsmooth/smoothing.hpp"

namespace fs = std::filesystem;
using namespace molsmooth;

namespace {

ExperimentConfig config_from(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  return load_config(path);
}

StimulusCondition parse_condition(const std::string& text, const ExperimentConfig& config) {
  int gms = 0;
  int trail = 0;
  int speed = 0;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(text);
  if (!(in >> gms >> c1 >> trail >> c2 >> speed) || c1 != ',' || c2 != ',' || (gms != 0 && gms != 1))
    throw InvalidInput("--condition expects GMS,TRAIL,SPEED, e.g. 1,2,3");
  for (StimulusCondition c : condition_matrix(config.harness.seed, config)) {
    if ((c.gms == GmsLevel::on) == (gms == 1) && c.vms_trail == trail) {
      c.speed_level = speed;
      return c;
    }
  }
  throw InvalidInput("trail length " + std::to_string(trail) + " is not part of the design");
}

int run_generate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out, const std::string& condition, bool dry_run,
                 unsigned threads, const std::string& format, bool layers, bool no_frames) {
  ExperimentConfig config = config_from(config_path);
  if (seed) config.harness.seed = *seed;
  if (!format.empty()) config.harness.frame_format = parse_frame_format(format);
  config.validate();
  const fs::path root = out.empty() ? fs::path(config.harness.out_dir) : fs::path(out);

  GenerateOptions gen;
  gen.threads = threads;
  gen.write_layers = layers;
  gen.write_frames = !no_frames;

  const auto start = std::chrono::steady_clock::now();
  if (!condition.empty()) {
    const StimulusCondition c = parse_condition(condition, config);
    if (dry_run) {
      const nlohmann::json plan = plan_stimulus(config, c);
      std::cout << plan.dump(2) << '\n';
      return 0;
    }
    const StimulusManifest m = generate_stimulus(config, c, root / c.name(), gen);
    std::printf("%s: %zu frames, n_window=%d, d=%.6g\n", m.name.c_str(), m.frame_hashes.size(),
                m.n_window, m.mean_displacement);
  } else {
    BatchOptions opts;
    opts.dry_run = dry_run;
    opts.generate = gen;
    const nlohmann::json index = batch(config, root, opts);
    for (const auto& s : index["stimuli"])
      std::printf("%2d  %s\n", s["order"].get<int>(), s["name"].get<std::string>().c_str());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("done in %.1f s -> %s\n", secs, root.string().c_str());
  return 0;
}

int run_calibrate(const std::string& config_path, std::optional<std::uint64_t> seed, int level,
                  double tau) {
  ExperimentConfig config = config_from(config_path);
  if (seed) config.harness.seed = *seed;
  const Calibration cal = calibrate(config, level, tau, config.harness.seed);
  std::printf("speed_level=%d v=%.6g tau=%.6g\n", level, cal.speed, cal.tau);
  std::printf("d_mol=%.6g\n", cal.d_mol);
  std::printf("mean_displacement=%.9g\n", cal.mean_displacement);
  for (const auto& [trail, n] : cal.windows) std::printf("trail=%d n_window=%d\n", trail, n);
  return 0;
}

int run_compensate(double s, const std::string& model_name) {
  const SpeedModel model = speed_model(parse_speed_mode(model_name));
  std::printf("model=%s es=%.6g\n", to_string(model.mode), estimated_speed(s, model));
  std::printf("cs=%.6g\n", compensate_speed(s));
  const Recommendation rec = recommend(s);
  std::printf("recommended: trail=%d gms=%s speed=%.6g\n", rec.trail_length,
              rec.gms == GmsLevel::on ? "on" : "off", rec.compensated_speed);
  return 0;
}

int run_verify(const std::string& manifest_path, unsigned threads) {
  StimulusManifest manifest;
  from_json(read_json(manifest_path), manifest);
  const auto bad = verify_manifest(manifest, threads);
  if (bad.empty()) {
    std::printf("%s: all %zu frame hashes reproduced\n", manifest.name.c_str(),
                manifest.frame_hashes.size());
    return 0;
  }
  std::printf("%s: %zu of %zu frames differ (first: %zu)\n", manifest.name.c_str(), bad.size(),
              manifest.frame_hashes.size(), bad.front());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Illustrative motion smoothing for molecular animation stimuli"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string condition;
  std::string format;
  bool dry_run = false;
  bool layers = false;
  bool no_frames = false;
  unsigned threads = 0;

  auto* gen = app.add_subcommand("generate", "Render stimuli (whole design or one condition)");
  gen->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  gen->add_option("--seed", seed, "Design seed (overrides harness.seed)");
  gen->add_option("--out", out, "Output root directory");
  gen->add_option("--condition", condition, "Single cell as GMS,TRAIL,SPEED");
  gen->add_flag("--dry-run", dry_run, "Write the index manifest only");
  gen->add_option("--threads", threads, "Worker threads (0 = all cores)");
  gen->add_option("--format", format, "Frame format: png or ppm");
  gen->add_flag("--layers", layers, "Also write both layers at the render frame rate");
  gen->add_flag("--no-frames", no_frames, "Compute frame hashes without writing frames");

  int level = 1;
  double tau = 0.0;
  auto* cal = app.add_subcommand("calibrate", "Print mean displacement and blur windows");
  cal->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  cal->add_option("--seed", seed, "Scene/noise seed");
  cal->add_option("--speed-level", level, "Ground-truth speed level (1-based)")->required();
  cal->add_option("--tau", tau, "Geometric smoothing factor")->check(CLI::Range(0.0, 1.0));

  double speed = 0.0;
  std::string model = "baseline";
  auto* comp = app.add_subcommand("compensate", "Estimated and compensated speed");
  comp->add_option("--speed", speed, "Ground-truth speed in percent")->required();
  comp->add_option("--model", model, "baseline | gms | vms2");

  std::string manifest;
  auto* ver = app.add_subcommand("verify", "Regenerate a stimulus and compare frame hashes");
  ver->add_option("--manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  ver->add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::string context_dir;
  std::string focus_dir;
  int window = 1;
  std::size_t decimation = 4;
  int png_level = 1;
  auto* compo = app.add_subcommand("composite", "Blur, blend and decimate layer frame directories");
  compo->add_option("--context", context_dir, "Context layer frames")->required();
  compo->add_option("--focus", focus_dir, "Focus layer frames")->required();
  compo->add_option("--out", out, "Output directory")->required();
  compo->add_option("--window", window, "Echo window (odd frame count)");
  compo->add_option("--decimate", decimation, "Keep every N-th frame");
  compo->add_option("--format", format, "Frame format: png or ppm");
  compo->add_option("--png-level", png_level, "zlib level 0-9");
  compo->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* dump = app.add_subcommand("default-config", "Print the default configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen)
      return run_generate(config_path, seed, out, condition, dry_run, threads, format, layers,
                          no_frames);
    if (*cal) return run_calibrate(config_path, seed, level, tau);
    if (*comp) return run_compensate(speed, model);
    if (*ver) return run_verify(manifest, threads);
    if (*compo) {
      ThreadPool pool(threads);
      const auto hashes = composite_directories(
          context_dir, focus_dir, out, EchoParams{window}, decimation,
          format.empty() ? FrameFormat::png : parse_frame_format(format), png_level, &pool);
      std::printf("wrote %zu frames to %s\n", hashes.size(), out.c_str());
      return 0;
    }
    if (*dump) {
      const nlohmann::json j = ExperimentConfig{};
      std::cout << j.dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
