#include "molsmooth/noise.hpp"

#include <cmath>

#include "molsmooth/error.hpp"
#include "molsmooth/random.hpp"

namespace molsmooth {

double smooth_weight(NoiseKernel kernel, double f) noexcept {
  switch (kernel) {
    case NoiseKernel::cubic:
      return f * f * (3.0 - 2.0 * f);
    case NoiseKernel::quintic:
      break;
  }
  return f * f * f * (f * (f * 6.0 - 15.0) + 10.0);
}

double NoiseField::hash_lattice(std::int64_t k) const noexcept {
  return unit_interval(mix64(seed_ ^ static_cast<std::uint64_t>(k)));
}

double NoiseField::sample_unchecked(double s) const noexcept {
  const double cell = std::floor(s);
  const double f = s - cell;
  const auto k = static_cast<std::int64_t>(cell);
  const double w = smooth_weight(kernel_, f);
  // (1-w)a + wb is exact at w = 0 and gives exactly (a+b)/2 at w = 1/2.
  return (1.0 - w) * hash_lattice(k) + w * hash_lattice(k + 1);
}

double NoiseField::sample(double s) const {
  if (!std::isfinite(s)) throw InvalidInput("noise sample argument must be finite");
  if (std::fabs(s) >= 0x1.0p62) throw InvalidInput("noise sample argument outside lattice range");
  return sample_unchecked(s);
}

}  // namespace molsmooth
