#include "molsmooth/config.hpp"

#include <cmath>
#include <fstream>

#include "molsmooth/error.hpp"

namespace molsmooth {

using nlohmann::json;

namespace {

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-vector, got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json rgb_json(RgbF c) { return json::array({c.r, c.g, c.b}); }

RgbF rgb_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected an RGB triple, got " + j.dump());
  return {j[0].get<float>(), j[1].get<float>(), j[2].get<float>()};
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

std::uint64_t seed_from(const json& j) {
  if (j.is_string()) return std::stoull(j.get<std::string>(), nullptr, 0);
  return j.get<std::uint64_t>();
}

const char* kernel_name(NoiseKernel k) { return k == NoiseKernel::cubic ? "cubic" : "quintic"; }

NoiseKernel kernel_from(const std::string& s) {
  if (s == "cubic") return NoiseKernel::cubic;
  if (s == "quintic") return NoiseKernel::quintic;
  throw ConfigError("unknown noise kernel '" + s + "'");
}

void from_json_impl(const json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  if (auto s = j.find("scene"); s != j.end()) {
    read(*s, "molecule_count", c.scene.molecule_count);
    read(*s, "type_count", c.scene.type_count);
    read(*s, "molecule_diameter", c.scene.molecule_diameter);
    if (auto b = s->find("box"); b != s->end()) {
      c.scene.box.min = vec_from(b->at("min"));
      c.scene.box.max = vec_from(b->at("max"));
    }
    if (auto sh = s->find("shapes"); sh != s->end()) {
      c.scene.shapes.clear();
      for (const json& shape : *sh) {
        ShapeSpec spec;
        for (const json& atom : shape) {
          if (!atom.is_array() || atom.size() != 4)
            throw ConfigError("atoms are [x, y, z, radius], got " + atom.dump());
          spec.push_back({{atom[0].get<double>(), atom[1].get<double>(), atom[2].get<double>()},
                          atom[3].get<double>()});
        }
        c.scene.shapes.push_back(std::move(spec));
      }
    }
  }
  if (auto m = j.find("motion"); m != j.end()) {
    read(*m, "speed_levels", c.motion.speed_levels);
    read(*m, "component_stride", c.motion.component_stride);
    read(*m, "molecule_stride", c.motion.molecule_stride);
    if (auto k = m->find("kernel"); k != m->end()) c.motion.kernel = kernel_from(k->get<std::string>());
  }
  if (auto r = j.find("reaction"); r != j.end()) {
    read(*r, "start_min_s", c.reaction.start_min_s);
    read(*r, "start_max_s", c.reaction.start_max_s);
    read(*r, "attract_s", c.reaction.attract_s);
    read(*r, "bond_s", c.reaction.bond_s);
    read(*r, "repulse_s", c.reaction.repulse_s);
    read(*r, "target_fraction", c.reaction.target_fraction);
    read(*r, "bond_distance", c.reaction.bond_distance);
  }
  if (auto r = j.find("render"); r != j.end()) {
    read(*r, "width", c.render.width);
    read(*r, "height", c.render.height);
    if (auto p = r->find("palette"); p != r->end()) {
      c.scene.palette.clear();
      for (const json& color : *p) c.scene.palette.push_back(parse_hex_color(color.get<std::string>()));
    }
    if (auto bg = r->find("background"); bg != r->end()) c.render.shading.background = rgb_from(*bg);
    read(*r, "ambient", c.render.shading.ambient);
    read(*r, "diffuse", c.render.shading.diffuse);
    if (auto l = r->find("light_dir"); l != r->end()) c.render.shading.light_dir = vec_from(*l);
  }
  if (auto s = j.find("smoothing"); s != j.end()) read(*s, "trail_lengths", c.smoothing.trail_lengths);
  if (auto h = j.find("harness"); h != j.end()) {
    if (auto seed = h->find("seed"); seed != h->end()) c.harness.seed = seed_from(*seed);
    read(*h, "duration_s", c.harness.duration_s);
    read(*h, "render_fps", c.harness.render_fps);
    read(*h, "output_fps", c.harness.output_fps);
    read(*h, "out_dir", c.harness.out_dir);
    if (auto f = h->find("frame_format"); f != h->end())
      c.harness.frame_format = parse_frame_format(f->get<std::string>());
    read(*h, "png_level", c.harness.png_level);
    read(*h, "encoder_command", c.harness.encoder_command);
    read(*h, "calibration_molecules", c.harness.calibration_molecules);
  }
}

}  // namespace

void to_json(json& j, const ExperimentConfig& c) {
  json shapes = json::array();
  for (const ShapeSpec& shape : c.scene.shapes) {
    json atoms = json::array();
    for (const Atom& a : shape) atoms.push_back({a.offset.x, a.offset.y, a.offset.z, a.radius});
    shapes.push_back(std::move(atoms));
  }
  json palette = json::array();
  for (Rgb8 color : c.scene.palette) palette.push_back(to_hex(color));

  j = json{
      {"scene",
       {{"molecule_count", c.scene.molecule_count},
        {"type_count", c.scene.type_count},
        {"molecule_diameter", c.scene.molecule_diameter},
        {"box", {{"min", vec_json(c.scene.box.min)}, {"max", vec_json(c.scene.box.max)}}},
        {"shapes", shapes}}},
      {"motion",
       {{"speed_levels", c.motion.speed_levels},
        {"component_stride", c.motion.component_stride},
        {"molecule_stride", c.motion.molecule_stride},
        {"kernel", kernel_name(c.motion.kernel)}}},
      {"reaction",
       {{"start_min_s", c.reaction.start_min_s},
        {"start_max_s", c.reaction.start_max_s},
        {"attract_s", c.reaction.attract_s},
        {"bond_s", c.reaction.bond_s},
        {"repulse_s", c.reaction.repulse_s},
        {"target_fraction", c.reaction.target_fraction},
        {"bond_distance", c.reaction.bond_distance}}},
      {"render",
       {{"width", c.render.width},
        {"height", c.render.height},
        {"palette", palette},
        {"background", rgb_json(c.render.shading.background)},
        {"ambient", c.render.shading.ambient},
        {"diffuse", c.render.shading.diffuse},
        {"light_dir", vec_json(c.render.shading.light_dir)}}},
      {"smoothing", {{"trail_lengths", c.smoothing.trail_lengths}}},
      {"harness",
       {{"seed", c.harness.seed},
        {"duration_s", c.harness.duration_s},
        {"render_fps", c.harness.render_fps},
        {"output_fps", c.harness.output_fps},
        {"out_dir", c.harness.out_dir},
        {"frame_format", to_string(c.harness.frame_format)},
        {"png_level", c.harness.png_level},
        {"encoder_command", c.harness.encoder_command},
        {"calibration_molecules", c.harness.calibration_molecules}}},
  };
}

void from_json(const json& j, ExperimentConfig& c) {
  try {
    from_json_impl(j, c);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

void ExperimentConfig::validate() const {
  if (scene.type_count < 2) throw ConfigError("scene.type_count must be >= 2");
  if (scene.molecule_count < static_cast<std::uint32_t>(scene.type_count))
    throw ConfigError("scene.molecule_count must be >= scene.type_count");
  if (!(scene.molecule_diameter > 0.0)) throw ConfigError("scene.molecule_diameter must be > 0");
  const Vec3 e = scene.box.extent();
  if (!(e.x > 0.0 && e.y > 0.0 && e.z >= 0.0)) throw ConfigError("scene.box must have positive extent");
  if (motion.speed_levels.size() < 2) throw ConfigError("motion.speed_levels needs >= 2 levels");
  for (std::size_t i = 0; i < motion.speed_levels.size(); ++i) {
    if (!(motion.speed_levels[i] > 0.0) || !std::isfinite(motion.speed_levels[i]))
      throw ConfigError("motion.speed_levels must be positive");
    if (i > 0 && !(motion.speed_levels[i] > motion.speed_levels[i - 1]))
      throw ConfigError("motion.speed_levels must be strictly increasing");
  }
  if (motion.component_stride <= 0 || motion.molecule_stride <= 0)
    throw ConfigError("motion strides must be positive");
  if (static_cast<double>(motion.molecule_stride) * scene.molecule_count >=
      static_cast<double>(motion.component_stride))
    throw ConfigError("motion.component_stride must exceed molecule_count * molecule_stride");
  const ReactionConfig& r = reaction;
  if (!(r.start_min_s >= 0.0 && r.start_max_s >= r.start_min_s))
    throw ConfigError("reaction start window is invalid");
  if (!(r.attract_s > 0.0 && r.bond_s >= 0.0 && r.repulse_s > 0.0))
    throw ConfigError("reaction phase durations must be positive");
  // The repulsion tail may run past the last frame; attraction and bond may not.
  if (r.start_max_s + r.attract_s + r.bond_s > harness.duration_s)
    throw ConfigError("reaction attraction and bond phases do not fit into the animation");
  if (!(r.target_fraction > 0.0 && r.target_fraction <= 1.0))
    throw ConfigError("reaction.target_fraction must lie in (0, 1]");
  if (!(r.bond_distance > 0.0)) throw ConfigError("reaction.bond_distance must be > 0");
  if (render.width <= 0 || render.height <= 0) throw ConfigError("render resolution must be positive");
  if (smoothing.trail_lengths.empty()) throw ConfigError("smoothing.trail_lengths is empty");
  for (int t : smoothing.trail_lengths)
    if (t < 0 || t > 4) throw ConfigError("smoothing.trail_lengths entries must lie in 0..4");
  if (!(harness.duration_s > 0.0)) throw ConfigError("harness.duration_s must be > 0");
  if (harness.render_fps <= 0 || harness.output_fps <= 0 ||
      harness.render_fps % harness.output_fps != 0)
    throw ConfigError("harness.render_fps must be a positive multiple of output_fps");
  if (harness.png_level < 0 || harness.png_level > 9) throw ConfigError("harness.png_level must be 0..9");
}

std::uint32_t ExperimentConfig::render_frame_count() const {
  return static_cast<std::uint32_t>(std::llround(harness.duration_s * harness.render_fps));
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig config;
  from_json(read_json(path), config);
  config.validate();
  return config;
}

}  // namespace molsmooth
