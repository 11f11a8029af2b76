#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "molsmooth/geometry.hpp"
#include "molsmooth/motion.hpp"

namespace molsmooth {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend constexpr bool operator==(Rgb8, Rgb8) noexcept = default;
};

/// Parses "#RRGGBB" (leading '#' optional). Throws ConfigError.
Rgb8 parse_hex_color(const std::string& text);
std::string to_hex(Rgb8 color);

/// ColorBrewer Set1, 8 classes.
inline constexpr std::array<Rgb8, 8> kSet1Palette{{
    {0xE4, 0x1A, 0x1C},
    {0x37, 0x7E, 0xB8},
    {0x4D, 0xAF, 0x4A},
    {0x98, 0x4E, 0xA3},
    {0xFF, 0x7F, 0x00},
    {0xFF, 0xFF, 0x33},
    {0xA6, 0x56, 0x28},
    {0xF7, 0x81, 0xBF},
}};

struct Atom {
  Vec3 offset;    ///< relative to the molecule origin
  double radius;
};

/// Atom layout of one molecule type, in units where the bounding sphere
/// diameter is close to 1.
using ShapeSpec = std::vector<Atom>;

/// Eight shapes with 1 to 8 atoms, used when the config supplies none.
const std::vector<ShapeSpec>& builtin_shapes();

/// Diameter of the smallest origin-centred sphere enclosing every atom.
double bounding_diameter(const std::vector<Atom>& atoms) noexcept;

struct MoleculeType {
  int type_id = 0;
  Rgb8 color;
  std::vector<Atom> atoms;  ///< scene units
};

/// Row-major rotation.
using Rotation = std::array<Vec3, 3>;

inline Vec3 rotate(const Rotation& r, Vec3 v) noexcept {
  return {dot(r[0], v), dot(r[1], v), dot(r[2], v)};
}

struct Molecule {
  MoleculeId id = 0;
  int type_id = 0;
  Rotation orientation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
};

struct SceneConfig {
  std::uint32_t molecule_count = 1000;
  int type_count = 8;
  Box box{};
  /// Target bounding-sphere diameter of a molecule, scene units.
  double molecule_diameter = 0.25;
  std::vector<ShapeSpec> shapes;  ///< empty = builtin_shapes()
  std::vector<Rgb8> palette{kSet1Palette.begin(), kSet1Palette.end()};
};

struct ScenePopulation {
  std::vector<MoleculeType> types;
  std::vector<Molecule> molecules;
  std::pair<MoleculeId, MoleculeId> focus_pair{0, 1};
  Box box;
  /// Mean bounding-sphere diameter over the types; one unit of trail length.
  double d_mol = 0.0;

  const MoleculeType& type_of(MoleculeId id) const { return types.at(molecules.at(id).type_id); }
};

/// Deterministic population: types assigned round-robin, then shuffled by
/// `seed`; focus pair drawn from two different types. Throws ConfigError on
/// fewer than two types, no molecules, fewer molecules than types, or
/// missing shapes/colors.
ScenePopulation build_scene(const SceneConfig& config, std::uint64_t seed);

}  // namespace molsmooth
