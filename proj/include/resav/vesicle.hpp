#pragma once

// Phase-field vesicle membrane: bending energy with volume and surface
// penalties, split into two nonlinear parts for the two-SAV scheme.

#include "resav/models.hpp"

namespace resav {

struct PfvmSpec {
  double epsilon = 0.0;
  double sigma1 = 0.01;
  double sigma2 = 0.01;
  double mobility = 1.0;
  double v0 = 0.0;
  double s0 = 0.0;
};

struct PfvmTerms {
  Field h;  ///< -Delta phi + G(phi)/eps^2
  double e_b = 0.0;
  double volume = 0.0;
  double surface = 0.0;
  Field mu_e1_part;  ///< variational derivative of the E_1 nonlinearity
  Field mu_e2_part;  ///< variational derivative of E_2
};

/// L = eps Delta^2, G = M.
///   E_1 = int [(-Delta phi) G/eps + G^2/(2 eps^3)] + (V - v0)^2/(2 sigma1)
///   E_2 = (S - s0)^2/(2 sigma2)
/// so that (1/2)(L phi, phi) + E_1 + E_2 is the full penalized energy.
class VesicleModel final : public Model {
 public:
  /// v0 and s0 are taken from phi0.
  VesicleModel(Grid grid, double epsilon, double sigma1, double sigma2, double mobility,
               const Field& phi0);
  VesicleModel(Grid grid, PfvmSpec spec);

  std::string name() const override { return "pfvm"; }
  const PfvmSpec& spec() const noexcept { return spec_; }

  double volume(const Field& phi) const;
  double surface(const Field& phi) const;
  PfvmTerms terms(const Field& phi) const;

  double energy_e1_part(const Field& phi) const;
  double energy_e2(const Field& phi) const;
  Field f1_prime(const Field& phi) const;
  Field f2_prime(const Field& phi) const;

  /// Single-SAV view: E_1 + E_2 and F_1' + F_2'.
  double energy_e1(const Field& phi) const override;
  Field f_prime(const Field& phi) const override;

 private:
  PfvmSpec spec_;
};

}  // namespace resav
