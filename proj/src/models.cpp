#include "resav/models.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace resav {

namespace {

double positive(const char* key, double v) {
  if (!(v > 0.0)) throw ConfigError(key, "must be positive");
  return v;
}

Symbol scaled_k2(const Grid& grid, double s) {
  const auto k2 = grid.k_squared();
  Symbol out(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) out[i] = s * k2[i];
  return out;
}

template <class Density>
double integrate(const Field& phi, Density density) {
  double s = 0.0;
  for (double v : phi.values()) s += density(v);
  return s * phi.grid().cell_volume();
}

template <class Fn>
Field pointwise(const Field& phi, Fn fn) {
  Field out(phi.grid());
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = fn(phi[i]);
  return out;
}

}  // namespace

double double_well(double phi) noexcept {
  const double q = phi * phi - 1.0;
  return 0.25 * q * q;
}

Model::Model(Grid grid, Symbol linear, Symbol mobility)
    : grid_(std::move(grid)), linear_(std::move(linear)), mobility_(std::move(mobility)) {
  if (linear_.size() != grid_.spectral_size() || mobility_.size() != grid_.spectral_size())
    throw DimensionMismatch("model: symbol size != grid spectral size");
  for (double g : mobility_)
    if (g < 0.0) throw InvariantViolation("model: mobility symbol must be nonnegative");
}

double Model::quadratic_energy(const SpectralField& phi_hat) const {
  return 0.5 * spectral_inner(phi_hat, phi_hat, linear_);
}

double Model::energy(const Field& phi) const {
  return quadratic_energy(forward(phi)) + energy_e1(phi);
}

double Model::dissipation_k(const SpectralField& mu_hat) const {
  return spectral_inner(mu_hat, mu_hat, mobility_);
}

double Model::dissipation_k(const Field&, const Field& mu) const {
  return dissipation_k(forward(mu));
}

SpectralField Model::chemical_potential(const Field& phi) const {
  SpectralField mu = apply_symbol(forward(phi), linear_);
  mu += forward(f_prime(phi));
  return mu;
}

// ------------------------------------------------------------------ AC

AllenCahn::AllenCahn(Grid grid, double sigma0)
    : Model(grid, scaled_k2(grid, positive("sigma0", sigma0)), Symbol(grid.spectral_size(), 1.0)),
      sigma0_(sigma0) {}

double AllenCahn::energy_e1(const Field& phi) const { return integrate(phi, double_well); }

Field AllenCahn::f_prime(const Field& phi) const {
  return pointwise(phi, [](double v) { return v * v * v - v; });
}

// ------------------------------------------------------------------ CH

CahnHilliard::CahnHilliard(Grid grid, double sigma0, double mobility, double epsilon)
    : Model(grid, scaled_k2(grid, positive("sigma0", sigma0)), scaled_k2(grid, positive("mobility", mobility))),
      sigma0_(sigma0),
      mobility_m_(mobility),
      epsilon_(positive("epsilon", epsilon)) {}

double CahnHilliard::energy_e1(const Field& phi) const {
  return integrate(phi, double_well) / (epsilon_ * epsilon_);
}

Field CahnHilliard::f_prime(const Field& phi) const {
  const double s = 1.0 / (epsilon_ * epsilon_);
  return pointwise(phi, [s](double v) { return s * (v * v * v - v); });
}

// ----------------------------------------------------------------- PFC

namespace {
Symbol pfc_symbol(const Grid& grid, double zeta) {
  const auto k2 = grid.k_squared();
  Symbol out(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) {
    const double s = zeta - k2[i];
    out[i] = s * s;
  }
  return out;
}
}  // namespace

PhaseFieldCrystal::PhaseFieldCrystal(Grid grid, double zeta, double epsilon, double mobility)
    : Model(grid, pfc_symbol(grid, zeta), scaled_k2(grid, positive("mobility", mobility))),
      zeta_(zeta),
      epsilon_(epsilon),
      mobility_m_(mobility) {}

double PhaseFieldCrystal::energy_e1(const Field& phi) const {
  const double e = epsilon_;
  return integrate(phi, [e](double v) { return 0.25 * v * v * v * v - 0.5 * e * v * v; });
}

Field PhaseFieldCrystal::f_prime(const Field& phi) const {
  const double e = epsilon_;
  return pointwise(phi, [e](double v) { return v * v * v - e * v; });
}

// ------------------------------------------------------- multi-component

MultiComponentModel::MultiComponentModel(ModelPtr base, std::vector<std::vector<double>> coupling)
    : base_(std::move(base)), coupling_(std::move(coupling)) {
  if (!base_) throw ConfigError("model", "multi-component model needs a base model");
  const auto m = coupling_.size();
  if (m == 0) throw ConfigError("coupling", "empty coupling matrix");
  Eigen::MatrixXd d(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    if (coupling_[i].size() != m) throw ConfigError("coupling", "matrix must be square");
    for (std::size_t j = 0; j < m; ++j) d(i, j) = coupling_[i][j];
  }
  if (!d.isApprox(d.transpose(), 1e-14)) throw ConfigError("coupling", "matrix must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(d);
  if (llt.info() != Eigen::Success) throw ConfigError("coupling", "matrix must be positive definite");
}

double MultiComponentModel::energy_e1(const std::vector<Field>& phi) const {
  double s = 0.0;
  for (const auto& p : phi) s += base_->energy_e1(p);
  return s;
}

std::vector<Field> MultiComponentModel::f_prime(const std::vector<Field>& phi) const {
  std::vector<Field> out;
  out.reserve(phi.size());
  for (const auto& p : phi) out.push_back(base_->f_prime(p));
  return out;
}

double MultiComponentModel::quadratic_energy(const std::vector<SpectralField>& phi_hat) const {
  const int m = components();
  double s = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (coupling_[i][j] != 0.0)
        s += coupling_[i][j] * spectral_inner(phi_hat[i], phi_hat[j], base_->linear_symbol());
  return 0.5 * s;
}

double MultiComponentModel::energy(const std::vector<Field>& phi) const {
  std::vector<SpectralField> hat;
  for (const auto& p : phi) hat.push_back(forward(p));
  return quadratic_energy(hat) + energy_e1(phi);
}

double MultiComponentModel::dissipation_k(const std::vector<SpectralField>& mu_hat) const {
  double s = 0.0;
  for (const auto& mu : mu_hat) s += base_->dissipation_k(mu);
  return s;
}

}  // namespace resav
