#pragma once

#include <cstdint>

namespace molsmooth {

enum class NoiseKernel { cubic, quintic };

/// Deterministic 1-D value noise over the real line with range [0, 1].
///
/// Integer lattice points carry hashed uniform values; between lattice points
/// the two neighbours are blended with a smoothstep kernel (cubic: C1 at the
/// lattice in value only, quintic: C1 and C2 in the blend weight). The hash
/// path is integer-only, so values are reproducible across platforms.
///
/// Instances are immutable and safe to share between threads.
class NoiseField {
public:
  constexpr explicit NoiseField(std::uint64_t seed = 0,
                                NoiseKernel kernel = NoiseKernel::quintic) noexcept
      : seed_(seed), kernel_(kernel) {}

  std::uint64_t seed() const noexcept { return seed_; }
  NoiseKernel kernel() const noexcept { return kernel_; }

  /// Uniform value in [0, 1) for lattice point k.
  double hash_lattice(std::int64_t k) const noexcept;

  /// Continuous noise value in [0, 1]. Throws InvalidInput on non-finite s.
  double sample(double s) const;

  /// Same as sample() without the finiteness check; for hot loops whose
  /// inputs are finite by construction.
  double sample_unchecked(double s) const noexcept;

private:
  std::uint64_t seed_;
  NoiseKernel kernel_;
};

/// Blend weight for a fractional offset in [0, 1].
double smooth_weight(NoiseKernel kernel, double f) noexcept;

}  // namespace molsmooth
