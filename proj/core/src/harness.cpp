#include "molsmooth/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <future>
#include <numbers>

#include "molsmooth/error.hpp"
#include "molsmooth/image_io.hpp"
#include "molsmooth/random.hpp"
#include "molsmooth/render.hpp"
#include "molsmooth/smoothing.hpp"

namespace molsmooth {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Stream tags for derive_seed().
constexpr std::uint64_t kOrderStream = 1;
constexpr std::uint64_t kSpeedStream = 2;
constexpr std::uint64_t kReactionStream = 3;
constexpr std::uint64_t kNoiseStream = 4;
constexpr std::uint64_t kCellStream = 100;

std::string seed_hex(std::uint64_t seed) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(seed));
  return buf;
}

std::uint64_t seed_from(const json& j) {
  if (j.is_string()) return std::stoull(j.get<std::string>(), nullptr, 0);
  return j.get<std::uint64_t>();
}

}  // namespace

std::string StimulusCondition::name() const {
  return "gms" + std::to_string(gms == GmsLevel::on ? 1 : 0) + "_trail" +
         std::to_string(vms_trail) + "_speed" + std::to_string(speed_level);
}

double speed_percent(int speed_level, int level_count) {
  if (level_count < 2 || speed_level < 1 || speed_level > level_count)
    throw InvalidInput("speed level out of range");
  return 100.0 * (speed_level - 1) / (level_count - 1);
}

ReactionScript sample_reaction(const ExperimentConfig& config, const ScenePopulation& pop,
                               std::uint64_t seed) {
  const ReactionConfig& rc = config.reaction;
  const int fps = config.harness.render_fps;
  Rng rng(seed);

  ReactionScript s;
  s.partner_a = pop.focus_pair.first;
  s.partner_b = pop.focus_pair.second;
  const auto first = static_cast<std::int64_t>(std::ceil(rc.start_min_s * fps - 1e-9));
  const auto last = static_cast<std::int64_t>(std::floor(rc.start_max_s * fps + 1e-9));
  s.t_start = static_cast<double>(rng.between(first, last)) / fps;
  s.d_attract = rc.attract_s;
  s.d_bond = rc.bond_s;
  s.d_repulse = rc.repulse_s;

  const Box& box = pop.box;
  const double f = rc.target_fraction;
  for (int c = 0; c < 3; ++c)
    s.target[c] = box.min[c] + (0.5 - 0.5 * f + f * rng.uniform()) * (box.max[c] - box.min[c]);

  const double diameter = 0.5 * (bounding_diameter(pop.type_of(s.partner_a).atoms) +
                                 bounding_diameter(pop.type_of(s.partner_b).atoms));
  const double angle = 2.0 * std::numbers::pi * rng.uniform();
  const double dist = rc.bond_distance * diameter;
  s.bond_offset = {dist * std::cos(angle), dist * std::sin(angle), 0.0};
  return s;
}

std::vector<StimulusCondition> condition_matrix(std::uint64_t seed, const ExperimentConfig& config) {
  struct Cell {
    GmsLevel gms;
    int trail;
  };
  std::vector<Cell> cells;
  for (GmsLevel g : {GmsLevel::off, GmsLevel::on})
    for (int t : config.smoothing.trail_lengths) cells.push_back({g, t});

  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng(derive_seed(seed, kOrderStream)).shuffle(order);

  const auto levels = static_cast<std::int64_t>(config.motion.speed_levels.size());
  std::vector<StimulusCondition> out;
  out.reserve(cells.size());
  for (std::size_t idx : order) {
    StimulusCondition c;
    c.gms = cells[idx].gms;
    c.vms_trail = cells[idx].trail;
    c.seed = derive_seed(seed, kCellStream + idx);
    c.speed_level = static_cast<int>(Rng(derive_seed(c.seed, kSpeedStream)).between(1, levels));
    const ScenePopulation pop = build_scene(config.scene, c.seed);
    c.reaction = sample_reaction(config, pop, derive_seed(c.seed, kReactionStream));
    out.push_back(c);
  }
  return out;
}

// ---- speed perception --------------------------------------------------

SpeedModel speed_model(SpeedMode mode) noexcept {
  switch (mode) {
    case SpeedMode::baseline: return {mode, 30.4, 0.6};
    case SpeedMode::gms: return {mode, 19.3, 0.6};
    case SpeedMode::vms_trail2: return {mode, 29.8, 0.4};
  }
  return {SpeedMode::baseline, 30.4, 0.6};
}

SpeedMode parse_speed_mode(const std::string& name) {
  if (name == "baseline") return SpeedMode::baseline;
  if (name == "gms") return SpeedMode::gms;
  if (name == "vms2" || name == "vms_trail2") return SpeedMode::vms_trail2;
  throw InvalidInput("unknown speed model '" + name + "' (baseline, gms, vms2)");
}

const char* to_string(SpeedMode mode) noexcept {
  switch (mode) {
    case SpeedMode::baseline: return "baseline";
    case SpeedMode::gms: return "gms";
    case SpeedMode::vms_trail2: return "vms2";
  }
  return "baseline";
}

double SpeedModel::extrapolate(double s) const noexcept { return intercept + slope * s; }

double estimated_speed(double s, const SpeedModel& model) {
  if (!(s >= 0.0 && s <= 100.0)) throw InvalidInput("ground-truth speed must lie in [0, 100]");
  return model.extrapolate(s);
}

double compensate_speed(double s) {
  if (!(s >= 0.0 && s <= 100.0)) throw InvalidInput("ground-truth speed must lie in [0, 100]");
  return 1.5 * (s + 1.0);
}

Recommendation recommend(double s) {
  return {2, s >= 50.0 ? GmsLevel::on : GmsLevel::off, compensate_speed(s)};
}

Calibration calibrate(const ExperimentConfig& config, int speed_level, double tau,
                      std::uint64_t seed) {
  config.validate();
  const auto levels = static_cast<int>(config.motion.speed_levels.size());
  if (speed_level < 1 || speed_level > levels)
    throw InvalidInput("speed level " + std::to_string(speed_level) + " out of range");
  const ScenePopulation pop = build_scene(config.scene, seed);
  MotionParams params;
  params.speed = config.motion.speed_levels[speed_level - 1];
  params.tau = tau;
  params.component_stride = config.motion.component_stride;
  params.molecule_stride = config.motion.molecule_stride;
  const BrownianMotion motion(NoiseField(derive_seed(seed, kNoiseStream), config.motion.kernel),
                              params, pop.box);
  Calibration cal;
  cal.speed = params.speed;
  cal.tau = tau;
  cal.d_mol = pop.d_mol;
  const std::uint32_t sample = config.harness.calibration_molecules == 0
                                   ? config.scene.molecule_count
                                   : std::min(config.harness.calibration_molecules,
                                              config.scene.molecule_count);
  cal.mean_displacement = displacement_stats(motion, sample, config.render_frame_count(),
                                             config.harness.render_fps);
  for (int trail : config.smoothing.trail_lengths)
    cal.windows.emplace_back(trail,
                             window_size(TrailSpec{trail}, pop.d_mol, cal.mean_displacement).n_window);
  return cal;
}

// ---- manifests -----------------------------------------------------------

namespace {

json phases_json(const PhaseFrames& p) {
  return {{"attract_start", p.attract_start},
          {"bond_start", p.bond_start},
          {"bond_end", p.bond_end},
          {"repulse_end", p.repulse_end}};
}

PhaseFrames phases_from(const json& j) {
  return {j.at("attract_start").get<std::int64_t>(), j.at("bond_start").get<std::int64_t>(),
          j.at("bond_end").get<std::int64_t>(), j.at("repulse_end").get<std::int64_t>()};
}

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }
Vec3 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

PhaseFrames phase_frames(const ReactionScript& s, double fps) {
  auto at = [fps](double t) { return static_cast<std::int64_t>(std::llround(t * fps)); };
  return {at(s.t_start), at(s.bond_start()), at(s.bond_end()), at(s.end())};
}

}  // namespace

void to_json(json& j, const StimulusManifest& m) {
  const StimulusCondition& c = m.condition;
  const ReactionScript& r = c.reaction;
  j = json{
      {"schema", kManifestSchema},
      {"name", m.name},
      {"condition",
       {{"gms", c.gms == GmsLevel::on ? "on" : "off"},
        {"tau", m.tau},
        {"vms_trail", c.vms_trail},
        {"speed_level", c.speed_level},
        {"speed_percent",
         speed_percent(c.speed_level, static_cast<int>(m.config.motion.speed_levels.size()))},
        {"seed", seed_hex(c.seed)}}},
      {"reaction",
       {{"partner_a", r.partner_a},
        {"partner_b", r.partner_b},
        {"type_a", m.type_a},
        {"type_b", m.type_b},
        {"color_a", to_hex(m.color_a)},
        {"color_b", to_hex(m.color_b)},
        {"t_start", r.t_start},
        {"durations", {{"attract", r.d_attract}, {"bond", r.d_bond}, {"repulse", r.d_repulse}}},
        {"target", vec_json(r.target)},
        {"bond_offset", vec_json(r.bond_offset)},
        {"render_frames", phases_json(m.render_phases)},
        {"output_frames", phases_json(m.output_phases)},
        {"in_view", m.reactants_in_view}}},
      {"calibration",
       {{"speed", m.speed},
        {"tau", m.tau},
        {"d_mol", m.d_mol},
        {"mean_displacement", m.mean_displacement},
        {"n_window", m.n_window}}},
      {"video",
       {{"width", m.config.render.width},
        {"height", m.config.render.height},
        {"render_fps", m.config.harness.render_fps},
        {"output_fps", m.config.harness.output_fps},
        {"render_frames", m.render_frames},
        {"frame_count", m.frame_hashes.size()},
        {"format", to_string(m.config.harness.frame_format)}}},
      {"config", m.config},
      {"frame_hashes", m.frame_hashes},
  };
}

void from_json(const json& j, StimulusManifest& m) {
  try {
    if (j.value("schema", std::string{}) != kManifestSchema)
      throw ConfigError("unsupported manifest schema '" + j.value("schema", std::string{}) + "'");
    m.name = j.at("name").get<std::string>();
    m.config = ExperimentConfig{};
    from_json(j.at("config"), m.config);
    const json& c = j.at("condition");
    m.condition.gms = c.at("gms").get<std::string>() == "on" ? GmsLevel::on : GmsLevel::off;
    m.condition.vms_trail = c.at("vms_trail").get<int>();
    m.condition.speed_level = c.at("speed_level").get<int>();
    m.condition.seed = seed_from(c.at("seed"));
    const json& r = j.at("reaction");
    ReactionScript& s = m.condition.reaction;
    s.partner_a = r.at("partner_a").get<MoleculeId>();
    s.partner_b = r.at("partner_b").get<MoleculeId>();
    s.t_start = r.at("t_start").get<double>();
    s.d_attract = r.at("durations").at("attract").get<double>();
    s.d_bond = r.at("durations").at("bond").get<double>();
    s.d_repulse = r.at("durations").at("repulse").get<double>();
    s.target = vec_from(r.at("target"));
    s.bond_offset = vec_from(r.at("bond_offset"));
    m.type_a = r.at("type_a").get<int>();
    m.type_b = r.at("type_b").get<int>();
    m.color_a = parse_hex_color(r.at("color_a").get<std::string>());
    m.color_b = parse_hex_color(r.at("color_b").get<std::string>());
    m.render_phases = phases_from(r.at("render_frames"));
    m.output_phases = phases_from(r.at("output_frames"));
    m.reactants_in_view = r.at("in_view").get<bool>();
    const json& cal = j.at("calibration");
    m.speed = cal.at("speed").get<double>();
    m.tau = cal.at("tau").get<double>();
    m.d_mol = cal.at("d_mol").get<double>();
    m.mean_displacement = cal.at("mean_displacement").get<double>();
    m.n_window = cal.at("n_window").get<int>();
    m.render_frames = j.at("video").at("render_frames").get<std::uint32_t>();
    m.frame_hashes = j.at("frame_hashes").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
}

// ---- generation ------------------------------------------------------------

StimulusScene stimulus_scene(const ExperimentConfig& config, const StimulusCondition& cond) {
  config.validate();
  const auto levels = static_cast<int>(config.motion.speed_levels.size());
  if (cond.speed_level < 1 || cond.speed_level > levels)
    throw InvalidInput("speed level " + std::to_string(cond.speed_level) + " out of range");
  TrailSpec{cond.vms_trail}.validate();
  cond.reaction.validate();

  ScenePopulation pop = build_scene(config.scene, cond.seed);
  if (cond.reaction.partner_a >= pop.molecules.size() ||
      cond.reaction.partner_b >= pop.molecules.size())
    throw InvalidInput("reaction partner outside the population");
  pop.focus_pair = {cond.reaction.partner_a, cond.reaction.partner_b};

  MotionParams params;
  params.speed = config.motion.speed_levels[cond.speed_level - 1];
  params.tau = tau_of(cond.gms);
  params.component_stride = config.motion.component_stride;
  params.molecule_stride = config.motion.molecule_stride;
  BrownianMotion context(NoiseField(derive_seed(cond.seed, kNoiseStream), config.motion.kernel),
                         params, pop.box);
  return {std::move(pop), context};
}

namespace {

struct StimulusSetup {
  ScenePopulation population;
  BrownianMotion context;
  StimulusManifest manifest;
};

StimulusSetup setup_stimulus(const ExperimentConfig& config, const StimulusCondition& cond) {
  auto [pop, context] = stimulus_scene(config, cond);
  const MotionParams& params = context.params();

  StimulusManifest m;
  m.name = cond.name();
  m.condition = cond;
  m.config = config;
  m.speed = params.speed;
  m.tau = params.tau;
  m.d_mol = pop.d_mol;
  m.render_frames = config.render_frame_count();
  const std::uint32_t sample = config.harness.calibration_molecules == 0
                                   ? config.scene.molecule_count
                                   : std::min(config.harness.calibration_molecules,
                                              config.scene.molecule_count);
  m.mean_displacement =
      displacement_stats(context, sample, m.render_frames, config.harness.render_fps);
  m.n_window = window_size(TrailSpec{cond.vms_trail}, pop.d_mol, m.mean_displacement).n_window;
  const MoleculeType& ta = pop.type_of(cond.reaction.partner_a);
  const MoleculeType& tb = pop.type_of(cond.reaction.partner_b);
  m.type_a = ta.type_id;
  m.type_b = tb.type_id;
  m.color_a = ta.color;
  m.color_b = tb.color;
  m.render_phases = phase_frames(cond.reaction, config.harness.render_fps);
  m.output_phases = phase_frames(cond.reaction, config.harness.output_fps);
  return {std::move(pop), context, std::move(m)};
}

bool partners_in_view(const ScenePopulation& pop, const BrownianMotion& context,
                      const ReactionScript& reaction, int fps, std::int64_t frame_count) {
  const auto first = static_cast<std::int64_t>(std::floor(reaction.t_start * fps));
  const auto last = std::min(frame_count - 1,
                             static_cast<std::int64_t>(std::ceil(reaction.end() * fps)));
  for (std::int64_t f = first; f <= last; ++f) {
    const double t = static_cast<double>(f) / fps;
    for (MoleculeId id : {reaction.partner_a, reaction.partner_b})
      if (!pop.box.contains(focus_position(id, t, reaction, context))) return false;
  }
  return true;
}

void run_encoder(const std::string& command, const fs::path& dir, int fps) {
  std::string cmd = command;
  auto replace = [&cmd](const std::string& key, const std::string& value) {
    for (std::size_t pos; (pos = cmd.find(key)) != std::string::npos;) cmd.replace(pos, key.size(), value);
  };
  replace("{dir}", dir.string());
  replace("{fps}", std::to_string(fps));
  if (std::system(cmd.c_str()) != 0) throw Error("encoder command failed: " + cmd);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

StimulusManifest render_stimulus(const ExperimentConfig& config, const StimulusCondition& cond,
                                 const std::optional<fs::path>& out_dir,
                                 const GenerateOptions& options) {
  StimulusSetup setup = setup_stimulus(config, cond);
  StimulusManifest& manifest = setup.manifest;
  const ScenePopulation& pop = setup.population;
  const BrownianMotion& context = setup.context;
  const ReactionScript& reaction = cond.reaction;
  manifest.reactants_in_view = partners_in_view(pop, context, reaction, config.harness.render_fps,
                                                manifest.render_frames);

  const bool write = out_dir.has_value() && options.write_frames;
  const bool layers = out_dir.has_value() && options.write_layers;
  const FrameFormat format = config.harness.frame_format;
  const int png_level = config.harness.png_level;
  if (write) ensure_dir(*out_dir);
  if (layers) {
    ensure_dir(*out_dir / "layers" / "context");
    ensure_dir(*out_dir / "layers" / "focus");
  }

  ThreadPool pool(options.threads);
  const Renderer renderer(pop, Camera(pop.box, config.render.width, config.render.height),
                          config.render.shading);
  const double fps = config.harness.render_fps;
  const std::size_t frames = manifest.render_frames;
  const auto factor = static_cast<std::size_t>(config.decimation_factor());

  auto render_layer = [&](std::size_t index, RenderLayer layer, FrameBuffer& out) {
    const auto positions = molecule_positions(pop, context, reaction, index / fps);
    renderer.render(positions, layer, out, &pool);
  };

  // Sequence ends are replicated by the echo window; keep them resident.
  constexpr RenderLayer kContext = RenderLayer::context_with_focus_mask;
  FrameBuffer first_ctx, last_ctx, scratch;
  Coverage first_cov, last_cov, scratch_cov;
  auto render_context = [&](std::size_t index, FrameBuffer& out, Coverage& cov) {
    const auto positions = molecule_positions(pop, context, reaction, index / fps);
    renderer.render(positions, kContext, out, &pool, &cov);
  };
  render_context(0, first_ctx, first_cov);
  render_context(frames - 1, last_ctx, last_cov);
  auto fetch = [&](std::size_t i) -> EchoInput {
    if (i == 0) return {first_ctx, &first_cov};
    if (i == frames - 1) return {last_ctx, &last_cov};
    render_context(i, scratch, scratch_cov);
    return {scratch, &scratch_cov};
  };
  SlidingEcho echo_stream(frames, EchoParams{manifest.n_window}, fetch, &pool,
                          renderer.background(kContext));

  // Encoding runs behind rendering when there is more than one worker.
  std::deque<std::future<void>> pending;
  const std::size_t max_pending = pool.size() > 1 ? pool.size() : 0;
  auto submit = [&](fs::path path, Image8 image) {
    if (max_pending == 0) {
      write_image(path, image, format, png_level);
      return;
    }
    while (pending.size() >= max_pending) {
      pending.front().get();
      pending.pop_front();
    }
    pending.push_back(std::async(std::launch::async, [path = std::move(path),
                                                      image = std::move(image), format,
                                                      png_level] {
      write_image(path, image, format, png_level);
    }));
  };

  FrameBuffer composite;
  FrameBuffer focus;
  FrameBuffer layer_ctx;
  manifest.frame_hashes.clear();
  manifest.frame_hashes.reserve((frames + factor - 1) / factor);
  for (std::size_t t = 0; t < frames; ++t) {
    if (layers) {
      render_layer(t, RenderLayer::context_with_focus_mask, layer_ctx);
      render_layer(t, RenderLayer::focus_only, focus);
      submit(*out_dir / "layers" / "context" / frame_filename(t, format), to_srgb8(layer_ctx));
      submit(*out_dir / "layers" / "focus" / frame_filename(t, format), to_srgb8(focus));
    }
    if (t % factor != 0) {
      echo_stream.skip();
      continue;
    }
    echo_stream.next(composite);
    render_layer(t, RenderLayer::focus_only, focus);
    screen_blend_into(composite, focus, &pool);
    Image8 image = to_srgb8(composite);
    manifest.frame_hashes.push_back(hash_hex(hash_image(image)));
    if (write) submit(*out_dir / frame_filename(t / factor, format), std::move(image));
  }
  while (!pending.empty()) {
    pending.front().get();
    pending.pop_front();
  }

  if (out_dir.has_value()) {
    ensure_dir(*out_dir);
    json j = manifest;
    write_json(*out_dir / "manifest.json", j);
    if (write && options.run_encoder && !config.harness.encoder_command.empty())
      run_encoder(config.harness.encoder_command, *out_dir, config.harness.output_fps);
  }
  return manifest;
}

}  // namespace

std::vector<Vec3> molecule_positions(const ScenePopulation& pop, const BrownianMotion& context,
                                     const ReactionScript& reaction, double t) {
  std::vector<Vec3> positions(pop.molecules.size());
  for (const Molecule& m : pop.molecules)
    positions[m.id] = reaction.involves(m.id) ? focus_position(m.id, t, reaction, context)
                                              : context.position(m.id, t);
  return positions;
}

StimulusManifest plan_stimulus(const ExperimentConfig& config, const StimulusCondition& condition) {
  StimulusSetup setup = setup_stimulus(config, condition);
  setup.manifest.reactants_in_view = partners_in_view(
      setup.population, setup.context, condition.reaction, config.harness.render_fps,
      setup.manifest.render_frames);
  return std::move(setup.manifest);
}

bool reactants_in_view(const ExperimentConfig& config, const StimulusCondition& condition) {
  return plan_stimulus(config, condition).reactants_in_view;
}

StimulusManifest generate_stimulus(const ExperimentConfig& config,
                                   const StimulusCondition& condition, const fs::path& out_dir,
                                   const GenerateOptions& options) {
  return render_stimulus(config, condition, out_dir, options);
}

json batch(const ExperimentConfig& config, const fs::path& out_root, const BatchOptions& options) {
  config.validate();
  const auto conditions = condition_matrix(config.harness.seed, config);
  json index = {{"schema", kIndexSchema},
                {"seed", seed_hex(config.harness.seed)},
                {"dry_run", options.dry_run},
                {"config", config},
                {"stimuli", json::array()}};
  for (std::size_t k = 0; k < conditions.size(); ++k) {
    const StimulusCondition& c = conditions[k];
    json entry = {{"order", k},
                  {"name", c.name()},
                  {"dir", c.name()},
                  {"gms", c.gms == GmsLevel::on ? "on" : "off"},
                  {"vms_trail", c.vms_trail},
                  {"speed_level", c.speed_level},
                  {"seed", seed_hex(c.seed)},
                  {"partners", {c.reaction.partner_a, c.reaction.partner_b}},
                  {"t_start", c.reaction.t_start}};
    index["stimuli"].push_back(std::move(entry));
  }
  ensure_dir(out_root);
  if (!options.dry_run) {
    for (const StimulusCondition& c : conditions)
      render_stimulus(config, c, out_root / c.name(), options.generate);
  }
  write_json(out_root / "index.json", index);
  return index;
}

std::vector<std::size_t> verify_manifest(const StimulusManifest& manifest, unsigned threads) {
  GenerateOptions options;
  options.threads = threads;
  options.write_frames = false;
  const StimulusManifest fresh =
      render_stimulus(manifest.config, manifest.condition, std::nullopt, options);
  std::vector<std::size_t> mismatched;
  const std::size_t n = std::max(fresh.frame_hashes.size(), manifest.frame_hashes.size());
  for (std::size_t i = 0; i < n; ++i)
    if (i >= fresh.frame_hashes.size() || i >= manifest.frame_hashes.size() ||
        fresh.frame_hashes[i] != manifest.frame_hashes[i])
      mismatched.push_back(i);
  return mismatched;
}

}  // namespace molsmooth
