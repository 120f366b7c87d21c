#pragma once

// Decoupled R-ESAV-2 solvers for periodic incompressible Navier-Stokes.
// Levels store velocity components in phi_hat; Scheme I also stores the
// pressure.

#include <vector>

#include "resav/integrators.hpp"

namespace resav {

enum class NsScheme {
  pressure_correction,  ///< Scheme I
  projection,           ///< Scheme II with the projected advection
};

/// Energy carried by the SAV: 1/2 |u|^2 with K = nu |grad u|^2, or
/// 1/2 |grad u|^2 with K = nu |Delta u|^2.
enum class NsEnergy { kinetic, enstrophy };

struct FlowOptions {
  double nu = 0.0;
  bool relaxed = true;
  bool strict = false;
  bool dealias = false;
  NsEnergy energy = NsEnergy::kinetic;
  double scale_c = 0.0;
  Forcing forcing;
};

double flow_energy(const std::vector<SpectralField>& u_hat, NsEnergy energy);
double flow_dissipation(const std::vector<SpectralField>& u_hat, double nu, NsEnergy energy);

/// (u . grad) u evaluated pseudo-spectrally.
std::vector<SpectralField> advection(const std::vector<SpectralField>& u_hat, bool dealias);

/// Zero-mean p with Delta p = div(f - (u . grad) u).
SpectralField flow_pressure(const std::vector<SpectralField>& u_hat,
                            const std::vector<SpectralField>* f_hat, bool dealias);

/// omega = d u2/dx - d u1/dy on a 2D grid.
Field vorticity(const std::vector<SpectralField>& u_hat);

StepReport step_ns_scheme1(History& hist, double dt, int k, const FlowOptions& opts);
StepReport step_ns_scheme2(History& hist, double dt, int k, const FlowOptions& opts);

History initial_history_flow(const std::vector<Field>& u0, const FlowOptions& opts,
                             const Field* p0 = nullptr);

SchemeKit ns_kit(NsScheme scheme, int k, FlowOptions opts);

/// Double shear layer on a 2D periodic box, Leray-projected.
std::vector<Field> shear_layer_init(const Grid& grid, double sigma, double eps);

}  // namespace resav
