#include "molsmooth/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "molsmooth/error.hpp"
#include "molsmooth/random.hpp"

namespace molsmooth {

Rgb8 parse_hex_color(const std::string& text) {
  std::string_view s = text;
  if (!s.empty() && s.front() == '#') s.remove_prefix(1);
  unsigned value = 0;
  if (s.size() != 6) throw ConfigError("bad color '" + text + "', expected #RRGGBB");
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, 16);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError("bad color '" + text + "', expected #RRGGBB");
  return {static_cast<std::uint8_t>(value >> 16), static_cast<std::uint8_t>(value >> 8),
          static_cast<std::uint8_t>(value)};
}

std::string to_hex(Rgb8 c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c.r, c.g, c.b);
  return buf;
}

const std::vector<ShapeSpec>& builtin_shapes() {
  static const std::vector<ShapeSpec> shapes = [] {
    std::vector<ShapeSpec> s;
    const double pi = std::numbers::pi;
    auto ring = [&](int n, double rad, double r) {
      ShapeSpec out;
      for (int k = 0; k < n; ++k) {
        const double a = 2.0 * pi * k / n;
        out.push_back({{rad * std::cos(a), rad * std::sin(a), 0.0}, r});
      }
      return out;
    };
    s.push_back({{{0.0, 0.0, 0.0}, 0.50}});
    s.push_back({{{-0.22, 0.0, 0.0}, 0.28}, {{0.22, 0.0, 0.0}, 0.28}});
    s.push_back(ring(3, 0.24, 0.26));
    {
      const double d = 0.25 / std::sqrt(3.0);
      s.push_back({{{d, d, d}, 0.25}, {{d, -d, -d}, 0.25}, {{-d, d, -d}, 0.25}, {{-d, -d, d}, 0.25}});
    }
    {
      ShapeSpec plus = ring(4, 0.30, 0.19);
      plus.push_back({{0.0, 0.0, 0.0}, 0.22});
      s.push_back(plus);
    }
    s.push_back(ring(6, 0.32, 0.17));
    s.push_back({{{0.0, 0.0, 0.0}, 0.21},
                 {{0.3, 0.0, 0.0}, 0.19},
                 {{-0.3, 0.0, 0.0}, 0.19},
                 {{0.0, 0.3, 0.0}, 0.19},
                 {{0.0, -0.3, 0.0}, 0.19},
                 {{0.0, 0.0, 0.3}, 0.19},
                 {{0.0, 0.0, -0.3}, 0.19}});
    {
      ShapeSpec cube;
      const double d = 0.17;
      for (int k = 0; k < 8; ++k)
        cube.push_back({{(k & 1) ? d : -d, (k & 2) ? d : -d, (k & 4) ? d : -d}, 0.20});
      s.push_back(cube);
    }
    return s;
  }();
  return shapes;
}

double bounding_diameter(const std::vector<Atom>& atoms) noexcept {
  double r = 0.0;
  for (const Atom& a : atoms) r = std::max(r, norm(a.offset) + a.radius);
  return 2.0 * r;
}

namespace {

// Uniformly distributed rotation from three uniforms (Shoemake).
Rotation random_rotation(Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double u3 = rng.uniform();
  const double pi = std::numbers::pi;
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  const double x = a * std::sin(2 * pi * u2);
  const double y = a * std::cos(2 * pi * u2);
  const double z = b * std::sin(2 * pi * u3);
  const double w = b * std::cos(2 * pi * u3);
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
           {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
           {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
}

}  // namespace

ScenePopulation build_scene(const SceneConfig& config, std::uint64_t seed) {
  if (config.type_count < 2) throw ConfigError("scene needs at least 2 molecule types");
  if (config.molecule_count == 0) throw ConfigError("scene needs at least one molecule");
  if (config.molecule_count < static_cast<std::uint32_t>(config.type_count))
    throw ConfigError("scene needs at least one molecule per type");
  if (!(config.molecule_diameter > 0.0)) throw ConfigError("molecule diameter must be positive");
  const auto& shapes = config.shapes.empty() ? builtin_shapes() : config.shapes;
  const auto types = static_cast<std::size_t>(config.type_count);
  if (shapes.size() < types) throw ConfigError("not enough molecule shapes for type count");
  if (config.palette.size() < types) throw ConfigError("not enough palette colors for type count");

  ScenePopulation pop;
  pop.box = config.box;
  double diameter_sum = 0.0;
  for (std::size_t t = 0; t < types; ++t) {
    if (shapes[t].empty() || shapes[t].size() > 8)
      throw ConfigError("molecule shapes need 1 to 8 atoms");
    MoleculeType type;
    type.type_id = static_cast<int>(t);
    type.color = config.palette[t];
    for (const Atom& a : shapes[t]) {
      if (!(a.radius > 0.0)) throw ConfigError("atom radius must be positive");
      type.atoms.push_back({config.molecule_diameter * a.offset, config.molecule_diameter * a.radius});
    }
    diameter_sum += bounding_diameter(type.atoms);
    pop.types.push_back(std::move(type));
  }
  pop.d_mol = diameter_sum / static_cast<double>(types);

  Rng rng(derive_seed(seed, 0x5CE9E));
  std::vector<int> assignment(config.molecule_count);
  for (std::uint32_t k = 0; k < config.molecule_count; ++k)
    assignment[k] = static_cast<int>(k % types);
  rng.shuffle(assignment);

  pop.molecules.reserve(config.molecule_count);
  for (std::uint32_t k = 0; k < config.molecule_count; ++k)
    pop.molecules.push_back({k, assignment[k], random_rotation(rng)});

  const auto a = static_cast<MoleculeId>(rng.below(config.molecule_count));
  std::vector<MoleculeId> others;
  for (const Molecule& m : pop.molecules)
    if (m.type_id != pop.molecules[a].type_id) others.push_back(m.id);
  const MoleculeId b = others[rng.below(others.size())];
  pop.focus_pair = {a, b};
  return pop;
}

}  // namespace molsmooth
