#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "frgs/grid.hpp"

namespace frgs {

using Rng = std::mt19937_64;

/// Deterministic per-task seed derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

inline double uniform(Rng& rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Independent uniform values in [-amp, amp].
inline GridField random_noise_field(const Grid& grid, Rng& rng, double amp = 1.0)
{
  std::vector<double> v(grid.size());
  for (auto& x : v)
    x = uniform(rng, -amp, amp);
  return GridField(grid, std::move(v));
}

/// Sum of `bumps` periodic Gaussians with random centers, widths in
/// [0.05, 0.2] L, and signed amplitudes in [-amp, amp] (or [0, amp]).
inline GridField random_bump_field(const Grid& grid, Rng& rng, int bumps, double amp = 1.0, bool positive = false)
{
  const double length = grid.length();
  const int dim = grid.dim();
  std::vector<double> v(grid.size(), 0.0);
  for (int b = 0; b < bumps; ++b) {
    double c[3];
    for (int a = 0; a < dim; ++a)
      c[a] = uniform(rng, 0.0, length);
    const double width = uniform(rng, 0.05, 0.2) * length;
    const double height = positive ? uniform(rng, 0.1 * amp, amp) : uniform(rng, -amp, amp);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto idx = grid.unravel(i);
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        double d = grid.coordinate(idx[a]) - c[a];
        d -= length * std::round(d / length);
        r2 += d * d;
      }
      v[i] += height * std::exp(-r2 / (width * width));
    }
  }
  return GridField(grid, std::move(v));
}

/// Either white noise, a smooth bump sum, or their sum, with a log-uniform
/// amplitude in [amp_lo, amp_hi].
inline GridField random_mixed_field(const Grid& grid, Rng& rng, double amp_lo = 0.1, double amp_hi = 10.0)
{
  const double amp = std::exp(uniform(rng, std::log(amp_lo), std::log(amp_hi)));
  const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
  if (kind == 0)
    return random_noise_field(grid, rng, amp);
  const int bumps = std::uniform_int_distribution<int>(1, 4)(rng);
  GridField smooth = random_bump_field(grid, rng, bumps, amp);
  if (kind == 1)
    return smooth;
  return lincomb(1.0, smooth, 1.0, random_noise_field(grid, rng, 0.1 * amp));
}

} // namespace frgs
