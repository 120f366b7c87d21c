#include "resav/navier_stokes.hpp"

#include <cmath>
#include <string>

namespace resav {

namespace {

constexpr double kSlack = 1e-10;
constexpr Complex kI{0.0, 1.0};

Symbol k4_symbol(const Grid& grid) {
  const auto k2 = grid.k_squared();
  Symbol s(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) s[i] = k2[i] * k2[i];
  return s;
}

std::span<const double> energy_symbol(const Grid& grid, NsEnergy energy) {
  if (energy == NsEnergy::kinetic) return {};
  return grid.k_squared();
}

std::vector<SpectralField> combine_velocity(const History& hist, std::span<const double> w) {
  std::vector<SpectralField> out;
  const int d = static_cast<int>(hist.newest().phi_hat.size());
  for (int i = 0; i < d; ++i) out.push_back(combine_levels(hist, w, i));
  return out;
}

std::optional<std::vector<SpectralField>> flow_forcing(const FlowOptions& opts, double t, int d) {
  if (!opts.forcing) return std::nullopt;
  auto f = opts.forcing(t);
  if (static_cast<int>(f.size()) != d) throw DimensionMismatch("forcing: component count mismatch");
  return f;
}

struct Predictor {
  std::vector<SpectralField> star;
  std::vector<SpectralField> adv;
  std::optional<std::vector<SpectralField>> f_hat;
  double k_extrap = 0.0;
  double lr_tilde = 0.0;
  double xi = 1.0;
  double v = 1.0;
};

Predictor predict(const History& hist, const BdfTableau& tab, double dt, int k,
                  const FlowOptions& opts) {
  Predictor pr;
  const Grid& grid = hist.newest().phi_hat.at(0).grid();
  const int d = grid.dim();
  pr.star = combine_velocity(hist, tab.b);
  const double e_star = flow_energy(pr.star, opts.energy);
  pr.k_extrap = flow_dissipation(pr.star, opts.nu, opts.energy);
  pr.f_hat = flow_forcing(opts, hist.t + dt, d);
  double f_term = 0.0;
  if (pr.f_hat)
    for (int i = 0; i < d; ++i)
      f_term += spectral_inner((*pr.f_hat)[i], pr.star[i], energy_symbol(grid, opts.energy));
  const double c = hist.scale_c;
  pr.lr_tilde = esav2_r_update(hist.newest().log_r, pr.k_extrap / c, f_term / c, dt);
  pr.xi = std::exp(pr.lr_tilde - e_star / c);
  pr.v = v_poly(k, pr.xi);
  pr.adv = advection(pr.star, opts.dealias);
  return pr;
}

StepReport finish(History& hist, const Predictor& pr, std::vector<SpectralField> u,
                  std::optional<SpectralField> p, double dt, int k, const FlowOptions& opts) {
  const double c = hist.scale_c;
  const long step = hist.step_index + 1;
  for (const auto& comp : u)
    for (const Complex& z : comp.coeffs())
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw NumericalError("step " + std::to_string(step) + ": velocity is not finite");

  const double e_new = flow_energy(u, opts.energy);
  const double k_new = flow_dissipation(u, opts.nu, opts.energy);
  RelaxOutcome rel{1.0, k_new > 0.0 ? pr.k_extrap / k_new : 0.0, 0};
  double lr = pr.lr_tilde;
  if (opts.relaxed) {
    rel = relax_esav2(pr.lr_tilde, e_new / c, k_new / c, pr.k_extrap / c, dt);
    lr = blend_log(rel.theta0, pr.lr_tilde, e_new / c);
  }
  if (!std::isfinite(lr)) throw NumericalError("step " + std::to_string(step) + ": ln R not finite");
  const double div = relative_divergence(u);

  if (opts.strict) {
    if (div > kSlack) raise_invariant(step, "divergence " + std::to_string(div));
    if (opts.relaxed) {
      if (lr > e_new / c + kSlack) raise_invariant(step, "ln R exceeds E/C after relaxation");
      const double res =
          esav2_admissibility(lr, pr.lr_tilde, k_new / c, pr.k_extrap / c, rel.gamma, dt);
      if (res > kSlack) raise_invariant(step, "admissibility equality residual " + std::to_string(res));
    }
    if (!pr.f_hat && lr > hist.newest().log_r + kSlack) raise_invariant(step, "ln R increased");
  }

  StepReport rep;
  rep.step = step;
  rep.t = hist.t + dt;
  rep.theta0 = rel.theta0;
  rep.gamma = rel.gamma;
  rep.xi = pr.xi;
  rep.log_r = lr;
  rep.e_original = e_new;
  rep.e_modified = c * lr;
  rep.dissipation = k_new;
  rep.divergence = div;
  rep.relax_case = rel.case_id;

  Level next;
  next.phi_hat = std::move(u);
  next.log_r = lr;
  next.pressure = std::move(p);
  push_level(hist, std::move(next), dt, static_cast<std::size_t>(k));
  return rep;
}

}  // namespace

double flow_energy(const std::vector<SpectralField>& u_hat, NsEnergy energy) {
  double s = 0.0;
  for (const auto& u : u_hat) s += spectral_inner(u, u, energy_symbol(u.grid(), energy));
  return 0.5 * s;
}

double flow_dissipation(const std::vector<SpectralField>& u_hat, double nu, NsEnergy energy) {
  if (u_hat.empty()) return 0.0;
  const Grid& grid = u_hat.front().grid();
  const Symbol k4 = energy == NsEnergy::enstrophy ? k4_symbol(grid) : Symbol{};
  double s = 0.0;
  for (const auto& u : u_hat)
    s += energy == NsEnergy::kinetic ? spectral_inner(u, u, grid.k_squared()) : spectral_inner(u, u, k4);
  return nu * s;
}

std::vector<SpectralField> advection(const std::vector<SpectralField>& u_hat, bool dealias_on) {
  const int d = static_cast<int>(u_hat.size());
  if (d == 0) return {};
  const Grid& grid = u_hat.front().grid();
  if (grid.dim() != d) throw DimensionMismatch("advection: velocity components != dimension");
  std::vector<SpectralField> src = u_hat;
  if (dealias_on)
    for (auto& s : src) dealias(s);
  std::vector<Field> u;
  for (const auto& s : src) u.push_back(backward(s));
  std::vector<SpectralField> out;
  for (int i = 0; i < d; ++i) {
    Field acc(grid);
    for (int j = 0; j < d; ++j) {
      const Field grad = backward(derivative(src[i], j));
      for (std::size_t n = 0; n < acc.size(); ++n) acc[n] += u[j][n] * grad[n];
    }
    out.push_back(forward(acc));
    if (dealias_on) dealias(out.back());
  }
  return out;
}

SpectralField flow_pressure(const std::vector<SpectralField>& u_hat,
                            const std::vector<SpectralField>* f_hat, bool dealias_on) {
  const Grid& grid = u_hat.at(0).grid();
  const int d = grid.dim();
  std::vector<SpectralField> g = advection(u_hat, dealias_on);
  for (auto& gi : g) gi *= -1.0;
  if (f_hat)
    for (int i = 0; i < d; ++i) g[i] += (*f_hat).at(i);
  SpectralField p(grid);
  for (std::size_t s = 0; s < p.size(); ++s) {
    Complex div{0.0, 0.0};
    double kk = 0.0;
    for (int i = 0; i < d; ++i) {
      const double kd = grid.k_derivative(i)[s];
      div += kI * kd * g[i][s];
      kk += kd * kd;
    }
    if (kk > 0.0) p[s] = -div / kk;
  }
  return p;
}

Field vorticity(const std::vector<SpectralField>& u_hat) {
  if (u_hat.size() != 2 || u_hat[0].grid().dim() != 2)
    throw DimensionMismatch("vorticity: 2D velocity required");
  SpectralField w = derivative(u_hat[1], 0);
  w -= derivative(u_hat[0], 1);
  return backward(w);
}

StepReport step_ns_scheme1(History& hist, double dt, int k, const FlowOptions& opts) {
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  const BdfTableau tab = bdf_tableau(k);
  const Grid& grid = hist.newest().phi_hat.at(0).grid();
  const int d = grid.dim();
  const Predictor pr = predict(hist, tab, dt, k, opts);
  const std::vector<SpectralField> a_hat = combine_velocity(hist, tab.a);

  SpectralField p_ext(grid);
  for (std::size_t j = 0; j < tab.p.size(); ++j)
    if (hist.levels[j].pressure) p_ext.axpy(tab.p[j], *hist.levels[j].pressure);

  const auto k2 = grid.k_squared();
  std::vector<SpectralField> u(d, SpectralField(grid));
  SpectralField p = p_ext;
  std::vector<Complex> ut(d);
  for (std::size_t s = 0; s < p.size(); ++s) {
    const double denom = tab.alpha / dt + opts.nu * k2[s];
    Complex div{0.0, 0.0};
    double kk = 0.0;
    for (int i = 0; i < d; ++i) {
      const double kd = grid.k_derivative(i)[s];
      Complex rhs = a_hat[i][s] / dt - pr.v * pr.adv[i][s] - kI * kd * p_ext[s];
      if (pr.f_hat) rhs += (*pr.f_hat)[i][s];
      ut[i] = rhs / denom;
      div += kI * kd * ut[i];
      kk += kd * kd;
    }
    const Complex phi = kk > 0.0 ? -(tab.alpha / dt) * div / kk : Complex{0.0, 0.0};
    for (int i = 0; i < d; ++i)
      u[i][s] = ut[i] - (dt / tab.alpha) * kI * grid.k_derivative(i)[s] * phi;
    p[s] += phi;
  }
  return finish(hist, pr, std::move(u), std::move(p), dt, k, opts);
}

StepReport step_ns_scheme2(History& hist, double dt, int k, const FlowOptions& opts) {
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  const BdfTableau tab = bdf_tableau(k);
  const Grid& grid = hist.newest().phi_hat.at(0).grid();
  const int d = grid.dim();
  const Predictor pr = predict(hist, tab, dt, k, opts);
  const std::vector<SpectralField> a_hat = combine_velocity(hist, tab.a);

  const auto k2 = grid.k_squared();
  std::vector<SpectralField> u(d, SpectralField(grid));
  for (std::size_t s = 0; s < k2.size(); ++s) {
    const double denom = tab.alpha / dt + opts.nu * k2[s];
    for (int i = 0; i < d; ++i) {
      Complex rhs = a_hat[i][s] / dt - pr.v * pr.adv[i][s];
      if (pr.f_hat) rhs += (*pr.f_hat)[i][s];
      u[i][s] = rhs / denom;
    }
  }
  return finish(hist, pr, leray_project(std::move(u)), std::nullopt, dt, k, opts);
}

History initial_history_flow(const std::vector<Field>& u0, const FlowOptions& opts,
                             const Field* p0) {
  if (u0.empty() || static_cast<int>(u0.size()) != u0.front().grid().dim())
    throw DimensionMismatch("initial velocity: component count != dimension");
  if (opts.scale_c < 0.0) throw ConfigError("scale_c", "must be positive");
  History h;
  Level lvl;
  for (const auto& c : u0) lvl.phi_hat.push_back(forward(c));
  if (p0 != nullptr) {
    SpectralField p = forward(*p0);
    p[0] = 0.0;
    lvl.pressure = std::move(p);
  } else {
    lvl.pressure = SpectralField(u0.front().grid());
  }
  const double e = flow_energy(lvl.phi_hat, opts.energy);
  h.scale_c = opts.scale_c > 0.0 ? opts.scale_c : std::max(1.0, std::abs(e));
  lvl.log_r = e / h.scale_c;
  h.levels.push_back(std::move(lvl));
  return h;
}

SchemeKit ns_kit(NsScheme scheme, int k, FlowOptions opts) {
  if (k < 1 || k > 4) throw ConfigError("scheme", "Navier-Stokes schemes are defined for BDF1..BDF4");
  SchemeKit kit;
  const bool one = scheme == NsScheme::pressure_correction;
  kit.name = std::string(one ? "ns-scheme1-bdf" : "ns-scheme2-bdf") + std::to_string(k);
  kit.order = k;
  if (one)
    kit.step = [opts](History& h, double dt, int order) { return step_ns_scheme1(h, dt, order, opts); };
  else
    kit.step = [opts](History& h, double dt, int order) { return step_ns_scheme2(h, dt, order, opts); };
  kit.describe = [opts](const History& h) {
    const Level& cur = h.newest();
    StepReport rep;
    rep.step = h.step_index;
    rep.t = h.t;
    rep.theta0 = 0.0;
    rep.log_r = cur.log_r;
    rep.e_original = flow_energy(cur.phi_hat, opts.energy);
    rep.e_modified = h.scale_c * cur.log_r;
    rep.xi = std::exp(cur.log_r - rep.e_original / h.scale_c);
    rep.dissipation = flow_dissipation(cur.phi_hat, opts.nu, opts.energy);
    rep.divergence = relative_divergence(cur.phi_hat);
    return rep;
  };
  return kit;
}

std::vector<Field> shear_layer_init(const Grid& grid, double sigma, double eps) {
  if (grid.dim() != 2) throw DimensionMismatch("shear layer: 2D grid required");
  const auto x = grid.coordinates(0);
  const auto y = grid.coordinates(1);
  const int ny = grid.extents()[1];
  Field u1(grid), u2(grid);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      const std::size_t n = i * static_cast<std::size_t>(ny) + j;
      u1[n] = y[j] <= 0.5 ? std::tanh(sigma * (y[j] - 0.25)) : std::tanh(sigma * (0.75 - y[j]));
      u2[n] = eps * std::sin(2.0 * M_PI * x[i]);
    }
  auto proj = leray_project({forward(u1), forward(u2)});
  return {backward(proj[0]), backward(proj[1])};
}

}  // namespace resav
