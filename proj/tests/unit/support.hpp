#pragma once

#include <cmath>
#include <random>

#include "resav/spectral.hpp"

namespace testing {

inline resav::Field random_smooth(const resav::Grid& grid, unsigned seed, double amp = 0.5) {
  // low-mode random trigonometric field, so derivatives stay moderate
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  resav::SpectralField hat(grid);
  const auto k2 = grid.k_squared();
  double kmin = 1e300;
  for (double v : k2)
    if (v > 0.0) kmin = std::min(kmin, v);
  for (std::size_t i = 0; i < hat.size(); ++i)
    if (k2[i] <= 9.0 * kmin) hat[i] = {u(gen), u(gen)};
  resav::Field f = resav::backward(hat);
  const double m = f.max_abs();
  if (m > 0.0) f *= amp / m;
  return f;
}

inline resav::Field random_noise(const resav::Grid& grid, unsigned seed, double amp = 1.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  resav::Field f(grid);
  for (double& v : f.values()) v = u(gen);
  return f;
}

}  // namespace testing
