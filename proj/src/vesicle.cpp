#include "resav/vesicle.hpp"

#include <cmath>

namespace resav {

namespace {

Symbol bending_symbol(const Grid& grid, double eps) {
  const auto k2 = grid.k_squared();
  Symbol s(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) s[i] = eps * k2[i] * k2[i];
  return s;
}

double g_of(double v) { return v * v * v - v; }
double g_prime(double v) { return 3.0 * v * v - 1.0; }

/// -Delta phi in physical space
Field neg_laplacian(const SpectralField& phi_hat) {
  return backward(apply_symbol(phi_hat, phi_hat.grid().k_squared()));
}

void check_spec(const PfvmSpec& s) {
  if (!(s.epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
  if (!(s.sigma1 > 0.0)) throw ConfigError("sigma1", "must be positive");
  if (!(s.sigma2 > 0.0)) throw ConfigError("sigma2", "must be positive");
  if (!(s.mobility > 0.0)) throw ConfigError("mobility", "must be positive");
}

}  // namespace

VesicleModel::VesicleModel(Grid grid, PfvmSpec spec)
    : Model(grid, bending_symbol(grid, spec.epsilon), Symbol(grid.spectral_size(), spec.mobility)),
      spec_(spec) {
  check_spec(spec_);
}

VesicleModel::VesicleModel(Grid grid, double epsilon, double sigma1, double sigma2,
                           double mobility, const Field& phi0)
    : VesicleModel(std::move(grid), PfvmSpec{epsilon, sigma1, sigma2, mobility, 0.0, 0.0}) {
  spec_.v0 = volume(phi0);
  spec_.s0 = surface(phi0);
}

double VesicleModel::volume(const Field& phi) const {
  double s = 0.0;
  for (double v : phi.values()) s += v + 1.0;
  return s * grid_.cell_volume();
}

double VesicleModel::surface(const Field& phi) const {
  const double eps = spec_.epsilon;
  const SpectralField hat = forward(phi);
  double bulk = 0.0;
  for (double v : phi.values()) bulk += double_well(v);
  bulk *= grid_.cell_volume() / eps;
  return 0.5 * eps * spectral_inner(hat, hat, grid_.k_squared()) + bulk;
}

double VesicleModel::energy_e1_part(const Field& phi) const {
  const double eps = spec_.epsilon;
  const Field nl = neg_laplacian(forward(phi));
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double g = g_of(phi[i]);
    s += nl[i] * g / eps + g * g / (2.0 * eps * eps * eps);
  }
  s *= grid_.cell_volume();
  const double dv = volume(phi) - spec_.v0;
  return s + dv * dv / (2.0 * spec_.sigma1);
}

double VesicleModel::energy_e2(const Field& phi) const {
  const double ds = surface(phi) - spec_.s0;
  return ds * ds / (2.0 * spec_.sigma2);
}

Field VesicleModel::f1_prime(const Field& phi) const {
  const double eps = spec_.epsilon;
  const Field nl = neg_laplacian(forward(phi));
  Field g(grid_);
  for (std::size_t i = 0; i < phi.size(); ++i) g[i] = g_of(phi[i]);
  const Field nl_g = neg_laplacian(forward(g));
  const double vol = (volume(phi) - spec_.v0) / spec_.sigma1;
  Field out(grid_);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double gp = g_prime(phi[i]);
    out[i] = nl_g[i] / eps + gp * nl[i] / eps + gp * g[i] / (eps * eps * eps) + vol;
  }
  return out;
}

Field VesicleModel::f2_prime(const Field& phi) const {
  const double eps = spec_.epsilon;
  const Field nl = neg_laplacian(forward(phi));
  const double w = (surface(phi) - spec_.s0) / spec_.sigma2;
  Field out(grid_);
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = w * (eps * nl[i] + g_of(phi[i]) / eps);
  return out;
}

double VesicleModel::energy_e1(const Field& phi) const {
  return energy_e1_part(phi) + energy_e2(phi);
}

Field VesicleModel::f_prime(const Field& phi) const {
  Field f = f1_prime(phi);
  f += f2_prime(phi);
  return f;
}

PfvmTerms VesicleModel::terms(const Field& phi) const {
  const double eps = spec_.epsilon;
  const Field nl = neg_laplacian(forward(phi));
  Field h(grid_);
  double hh = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    h[i] = nl[i] + g_of(phi[i]) / (eps * eps);
    hh += h[i] * h[i];
  }
  const double e_b = 0.5 * eps * hh * grid_.cell_volume();
  Field mu1 = f1_prime(phi);
  mu1 += backward(apply_symbol(forward(phi), linear_));
  return PfvmTerms{std::move(h), e_b, volume(phi), surface(phi), std::move(mu1), f2_prime(phi)};
}

}  // namespace resav
