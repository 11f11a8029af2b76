#include "molsmooth/motion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "molsmooth/error.hpp"
#include "molsmooth/random.hpp"

namespace molsmooth {

namespace {

double ease(double x) noexcept {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

}  // namespace

void MotionParams::validate() const {
  if (!std::isfinite(speed) || speed <= 0.0) throw InvalidInput("motion speed must be > 0");
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidInput("motion tau must lie in [0, 1]");
  if (component_stride <= 0 || molecule_stride <= 0)
    throw InvalidInput("motion strides must be positive");
}

double seed_offset(MoleculeId i, int c, const MotionParams& params) noexcept {
  const std::int64_t offset = static_cast<std::int64_t>(c + 1) * params.component_stride +
                              static_cast<std::int64_t>(i) * params.molecule_stride;
  // Integer offsets alone would start every trajectory on a lattice point, so
  // all molecules would speed up and slow down in lockstep. A hashed
  // sub-lattice phase (on a 2^-20 grid, exact in double) desynchronises them.
  // Double mixing keeps it independent of the lattice hash mix64(seed ^ k).
  const std::uint64_t bits = mix64(mix64(static_cast<std::uint64_t>(offset)) ^ 0x5851F42D4C957F2Dull);
  const double phase = static_cast<double>(bits >> 44) * 0x1.0p-20;
  return static_cast<double>(offset) + phase;
}

double context_position(const NoiseField& noise, MoleculeId i, int c, double t,
                        const MotionParams& params) {
  if (!std::isfinite(t)) throw InvalidInput("time must be finite");
  const double u = seed_offset(i, c, params) + t * params.speed;
  return noise.sample(u + (1.0 - params.tau) * noise.sample(u));
}

BrownianMotion::BrownianMotion(NoiseField noise, MotionParams params, Box box)
    : noise_(noise), params_(params), box_(box) {
  params_.validate();
}

Vec3 BrownianMotion::position(MoleculeId i, double t) const noexcept {
  Vec3 unit;
  for (int c = 0; c < 3; ++c) {
    const double u = seed_offset(i, c, params_) + t * params_.speed;
    unit[c] = noise_.sample_unchecked(u + (1.0 - params_.tau) * noise_.sample_unchecked(u));
  }
  return box_.from_unit(unit);
}

BrownianMotion BrownianMotion::with_tau(double tau) const {
  MotionParams p = params_;
  p.tau = tau;
  return BrownianMotion(noise_, p, box_);
}

void ReactionScript::validate() const {
  if (partner_a == partner_b) throw InvalidInput("reaction partners must differ");
  if (!(d_attract > 0.0 && d_bond >= 0.0 && d_repulse > 0.0))
    throw InvalidInput("reaction phase durations must be positive");
  if (!std::isfinite(t_start) || t_start < 0.0) throw InvalidInput("reaction start must be >= 0");
}

ReactionPhase phase_at(const ReactionScript& s, double t) noexcept {
  if (t < s.t_start) return ReactionPhase::before;
  if (t < s.bond_start()) return ReactionPhase::attract;
  if (t < s.bond_end()) return ReactionPhase::bond;
  if (t <= s.end()) return ReactionPhase::repulse;
  return ReactionPhase::after;
}

const char* to_string(ReactionPhase phase) noexcept {
  switch (phase) {
    case ReactionPhase::before: return "before";
    case ReactionPhase::attract: return "attract";
    case ReactionPhase::bond: return "bond";
    case ReactionPhase::repulse: return "repulse";
    case ReactionPhase::after: return "after";
  }
  return "unknown";
}

namespace {

// Shared center of the bonded pair. Partner A's raw displacement since the
// bond started, kept inside the box so both partners stay in view.
Vec3 bond_center(double t, const ReactionScript& s, const BrownianMotion& raw) {
  const Vec3 drift = raw.position(s.partner_a, t) - raw.position(s.partner_a, s.bond_start());
  Vec3 center = s.target + drift;
  const Box& box = raw.box();
  for (int c = 0; c < 3; ++c) {
    const double half = 0.5 * std::fabs(s.bond_offset[c]);
    const double lo = box.min[c] + half;
    const double hi = box.max[c] - half;
    center[c] = lo <= hi ? std::clamp(center[c], lo, hi) : box.center()[c];
  }
  return center;
}

}  // namespace

Vec3 focus_position(MoleculeId m, double t, const ReactionScript& s,
                    const BrownianMotion& motion) {
  if (!s.involves(m))
    throw ContractViolation("molecule " + std::to_string(m) + " is not a reaction partner");
  const BrownianMotion raw = motion.params().tau == 0.0 ? motion : motion.with_tau(0.0);
  const Vec3 half = (m == s.partner_a ? 0.5 : -0.5) * s.bond_offset;

  switch (phase_at(s, t)) {
    case ReactionPhase::before:
    case ReactionPhase::after:
      return raw.position(m, t);
    case ReactionPhase::attract: {
      const double w = ease((t - s.t_start) / s.d_attract);
      return (1.0 - w) * raw.position(m, t) + w * (s.target + half);
    }
    case ReactionPhase::bond:
      return bond_center(t, s, raw) + half;
    case ReactionPhase::repulse: {
      const double w = 1.0 - ease((t - s.bond_end()) / s.d_repulse);
      const Vec3 release = bond_center(s.bond_end(), s, raw) + half;
      return (1.0 - w) * raw.position(m, t) + w * release;
    }
  }
  return raw.position(m, t);
}

double displacement_stats(const BrownianMotion& motion, std::uint32_t n_molecules,
                          std::uint32_t n_frames, double frame_rate) {
  if (n_molecules == 0 || n_frames == 0) throw InvalidInput("displacement_stats needs samples");
  if (!(frame_rate > 0.0)) throw InvalidInput("frame rate must be positive");
  const double dt = 1.0 / frame_rate;
  double total = 0.0;
  for (MoleculeId i = 0; i < n_molecules; ++i) {
    Vec3 prev = motion.position(i, 0.0);
    double sum = 0.0;
    for (std::uint32_t f = 1; f <= n_frames; ++f) {
      const Vec3 cur = motion.position(i, f * dt);
      sum += norm(cur - prev);
      prev = cur;
    }
    total += sum;
  }
  return total / (static_cast<double>(n_molecules) * n_frames);
}

}  // namespace molsmooth
