#pragma once

// Initial data, manufactured solutions and scheme assembly from a config.

#include <cstdint>
#include <functional>
#include <vector>

#include "resav/harness/config.hpp"
#include "resav/integrators.hpp"
#include "resav/navier_stokes.hpp"

namespace resav::harness {

struct Problem {
  Grid grid;
  SchemeKit kit;
  History initial;
  bool flow = false;
  /// Closed-form solution at time t, empty unless init=manufactured.
  std::function<std::vector<Field>(double)> exact;
};

Grid make_grid(const RunConfig& cfg);
Problem build_problem(const RunConfig& cfg);
std::vector<Field> level_fields(const Level& level);

Field star_shape(const Grid& grid, double alpha);
Field random_field(const Grid& grid, std::uint64_t seed, double amplitude, double mean);
Field circle_array(const Grid& grid, double eps);
Field crystal_patches(const Grid& grid, double phi_bar, double a1, double a2);
Field four_spheres(const Grid& grid, double eps);

/// exp(sin(pi x) sin(pi y)) sin(t)
Field gradient_flow_exact(const Grid& grid, double t);
/// Forcing that makes gradient_flow_exact solve phi_t = -G mu for every
/// component of a coupled system (coupling empty for a single model).
Forcing gradient_flow_forcing(ModelPtr model, std::vector<std::vector<double>> coupling);

std::vector<Field> flow_exact_velocity(const Grid& grid, double t);
Field flow_exact_pressure(const Grid& grid, double t);
Forcing flow_forcing(const Grid& grid, double nu);

}  // namespace resav::harness
