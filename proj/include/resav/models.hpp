#pragma once

// Gradient-flow models phi_t = -G mu, mu = L phi + F'(phi), with L and G
// diagonal in Fourier space.

#include <memory>
#include <string>
#include <vector>

#include "resav/spectral.hpp"

namespace resav {

class Model {
 public:
  Model(Grid grid, Symbol linear, Symbol mobility);
  virtual ~Model() = default;

  virtual std::string name() const = 0;

  const Grid& grid() const noexcept { return grid_; }
  const Symbol& linear_symbol() const noexcept { return linear_; }
  const Symbol& mobility_symbol() const noexcept { return mobility_; }
  /// G annihilates constants, so the mean of phi is invariant.
  bool conserves_mass() const noexcept { return mobility_.front() == 0.0; }

  /// E_1(phi) = int F(phi)
  virtual double energy_e1(const Field& phi) const = 0;
  virtual Field f_prime(const Field& phi) const = 0;

  /// (1/2)(L phi, phi)
  double quadratic_energy(const SpectralField& phi_hat) const;
  double energy(const Field& phi) const;
  /// (G mu, mu)
  double dissipation_k(const SpectralField& mu_hat) const;
  double dissipation_k(const Field& phi, const Field& mu) const;
  /// L phi + F'(phi)
  SpectralField chemical_potential(const Field& phi) const;

 protected:
  Grid grid_;
  Symbol linear_;
  Symbol mobility_;
};

using ModelPtr = std::shared_ptr<const Model>;

/// L = -sigma0 Delta, G = I, F = (phi^2 - 1)^2 / 4.
class AllenCahn final : public Model {
 public:
  AllenCahn(Grid grid, double sigma0);
  std::string name() const override { return "ac"; }
  double energy_e1(const Field& phi) const override;
  Field f_prime(const Field& phi) const override;
  double sigma0() const noexcept { return sigma0_; }

 private:
  double sigma0_;
};

/// L = -sigma0 Delta, G = -M Delta, F = (phi^2 - 1)^2 / (4 eps^2).
class CahnHilliard final : public Model {
 public:
  CahnHilliard(Grid grid, double sigma0, double mobility, double epsilon);
  std::string name() const override { return "ch"; }
  double energy_e1(const Field& phi) const override;
  Field f_prime(const Field& phi) const override;
  double sigma0() const noexcept { return sigma0_; }
  double mobility() const noexcept { return mobility_m_; }
  double epsilon() const noexcept { return epsilon_; }

 private:
  double sigma0_, mobility_m_, epsilon_;
};

/// L = (Delta + zeta)^2, G = -M Delta, F = phi^4/4 - eps phi^2/2.
class PhaseFieldCrystal final : public Model {
 public:
  PhaseFieldCrystal(Grid grid, double zeta, double epsilon, double mobility);
  std::string name() const override { return "pfc"; }
  double energy_e1(const Field& phi) const override;
  Field f_prime(const Field& phi) const override;

 private:
  double zeta_, epsilon_, mobility_m_;
};

/// m copies of a base model coupled through the linear part:
///   mu_i = sum_j d_ij L phi_j + F'(phi_i),  E_1 = sum_i E_1(phi_i).
class MultiComponentModel {
 public:
  MultiComponentModel(ModelPtr base, std::vector<std::vector<double>> coupling);

  const Model& base() const noexcept { return *base_; }
  const Grid& grid() const noexcept { return base_->grid(); }
  int components() const noexcept { return static_cast<int>(coupling_.size()); }
  const std::vector<std::vector<double>>& coupling() const noexcept { return coupling_; }

  double energy_e1(const std::vector<Field>& phi) const;
  std::vector<Field> f_prime(const std::vector<Field>& phi) const;
  /// (1/2) sum_ij d_ij (phi_i, L phi_j)
  double quadratic_energy(const std::vector<SpectralField>& phi_hat) const;
  double energy(const std::vector<Field>& phi) const;
  double dissipation_k(const std::vector<SpectralField>& mu_hat) const;

 private:
  ModelPtr base_;
  std::vector<std::vector<double>> coupling_;
};

double double_well(double phi) noexcept;

}  // namespace resav
