#pragma once

#include <cstdint>

#include "molsmooth/geometry.hpp"
#include "molsmooth/noise.hpp"

namespace molsmooth {

using MoleculeId = std::uint32_t;

/// Parameters of the noise-driven Brownian approximation.
struct MotionParams {
  double speed = 0.1;                        ///< noise-domain units per second
  double tau = 0.0;                          ///< trajectory smoothing, 0 = raw, 1 = straight
  std::int64_t component_stride = 1'000'003; ///< seed offset between x, y, z
  std::int64_t molecule_stride = 101;        ///< seed offset between molecules

  /// Throws InvalidInput when a field is outside its domain.
  void validate() const;
};

/// Noise-domain seed offset for molecule `i`, component `c`:
/// (c + 1) * component_stride + i * molecule_stride plus a fixed hashed
/// phase in [0, 1) so trajectories do not share their lattice phase.
double seed_offset(MoleculeId i, int c, const MotionParams& params) noexcept;

/// Noise-domain coordinate in [0, 1] of component `c` of molecule `i` at
/// time `t`:
///
///   u = offset + t * speed
///   p = n(u + (1 - tau) * n(u))
///
/// tau = 0 keeps the full nested jitter, tau = 1 reduces to n(u).
double context_position(const NoiseField& noise, MoleculeId i, int c, double t,
                        const MotionParams& params);

/// Scene-space context trajectories: noise coordinates mapped affinely onto
/// a box.
class BrownianMotion {
public:
  BrownianMotion(NoiseField noise, MotionParams params, Box box);

  const NoiseField& noise() const noexcept { return noise_; }
  const MotionParams& params() const noexcept { return params_; }
  const Box& box() const noexcept { return box_; }

  Vec3 position(MoleculeId i, double t) const noexcept;

  /// Same trajectory family with a different smoothing factor.
  BrownianMotion with_tau(double tau) const;

private:
  NoiseField noise_;
  MotionParams params_;
  Box box_;
};

/// Scripted reaction between two focus molecules: an attraction phase, a
/// bond phase where both move rigidly together, then a repulsion phase.
struct ReactionScript {
  MoleculeId partner_a = 0;
  MoleculeId partner_b = 1;
  double t_start = 5.0;
  double d_attract = 5.0;
  double d_bond = 1.0;
  double d_repulse = 5.0;
  Vec3 target{};
  Vec3 bond_offset{};

  double bond_start() const noexcept { return t_start + d_attract; }
  double bond_end() const noexcept { return bond_start() + d_bond; }
  double end() const noexcept { return bond_end() + d_repulse; }
  double duration() const noexcept { return d_attract + d_bond + d_repulse; }

  bool involves(MoleculeId m) const noexcept { return m == partner_a || m == partner_b; }

  /// Throws InvalidInput for identical partners or negative durations.
  void validate() const;
};

enum class ReactionPhase { before, attract, bond, repulse, after };

ReactionPhase phase_at(const ReactionScript& script, double t) noexcept;
const char* to_string(ReactionPhase phase) noexcept;

/// Scene position of a reaction partner at time `t`.
///
/// Focus molecules always follow the unsmoothed (tau = 0) path of `motion`.
/// Inside the reaction window that path is blended towards the bond pose
/// with an ease-in-out weight; during the bond both partners share partner
/// A's displacement so their relative offset stays fixed.
///
/// Throws ContractViolation if `m` is not a partner of `script`.
Vec3 focus_position(MoleculeId m, double t, const ReactionScript& script,
                    const BrownianMotion& motion);

/// Mean per-frame displacement (scene units) over molecules [0, n_molecules)
/// and frame steps [0, n_frames) starting at t = 0.
double displacement_stats(const BrownianMotion& motion, std::uint32_t n_molecules,
                          std::uint32_t n_frames, double frame_rate);

}  // namespace molsmooth
