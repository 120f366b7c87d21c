#include "resav/integrators.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace resav {

namespace {

constexpr double kEnergySlack = 1e-10;

double mean_of(const SpectralField& f) {
  return f[0].real() / static_cast<double>(f.grid().size());
}

double quad(const SpectralField& f, const Symbol& l) { return spectral_inner(f, f, l); }

std::optional<std::vector<SpectralField>> eval_forcing(const SchemeOptions& opts, double t,
                                                       std::size_t components) {
  if (!opts.forcing) return std::nullopt;
  auto f = opts.forcing(t);
  if (f.size() != components) throw DimensionMismatch("forcing: component count mismatch");
  return f;
}

double resolve_scale(const SchemeOptions& opts, double energy) {
  if (opts.scale_c < 0.0) throw ConfigError("scale_c", "must be positive");
  if (opts.scale_c > 0.0) return opts.scale_c;
  return std::max(1.0, std::abs(energy));
}

void check_finite_field(const SpectralField& f, long step) {
  for (const Complex& c : f.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw NumericalError("step " + std::to_string(step) + ": solution is not finite");
}

void check_energy_decay(double e_new, double e_old, double bound, long step) {
  if (e_new - e_old > bound + kEnergySlack * (1.0 + std::abs(e_new)))
    raise_invariant(step, "modified energy increased from " + std::to_string(e_old) + " to " +
                              std::to_string(e_new));
}

/// First-kind modified energy for BDF1 (one level) or BDF2 (two levels).
double esav1_modified(const Model& model, const SpectralField& phi, const SpectralField* prev,
                      double lr, double lr_prev, double c) {
  const Symbol& l = model.linear_symbol();
  if (prev == nullptr) return 0.5 * quad(phi, l) + c * lr;
  SpectralField ext = 2.0 * phi;
  ext -= *prev;
  return 0.25 * (quad(phi, l) + quad(ext, l)) + 0.5 * c * (3.0 * lr - lr_prev);
}

}  // namespace

[[noreturn]] void raise_invariant(long step, const std::string& what) {
  throw InvariantViolation("step " + std::to_string(step) + ": " + what);
}

SpectralField combine_levels(const History& hist, std::span<const double> weights, int comp) {
  if (hist.levels.size() < weights.size())
    throw InvariantViolation("history shorter than the scheme order");
  SpectralField out(hist.levels.front().phi_hat.at(comp).grid());
  for (std::size_t j = 0; j < weights.size(); ++j) out.axpy(weights[j], hist.levels[j].phi_hat[comp]);
  return out;
}

double combine_log(const History& hist, std::span<const double> weights, bool second) {
  double s = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j)
    s += weights[j] * (second ? hist.levels[j].log_r2 : hist.levels[j].log_r);
  return s;
}

void push_level(History& hist, Level level, double dt, std::size_t keep) {
  hist.levels.push_front(std::move(level));
  while (hist.levels.size() > keep) hist.levels.pop_back();
  hist.t += dt;
  ++hist.step_index;
}

// -------------------------------------------------------- R-ESAV-1/BDFk

StepReport step_resav1_bdfk(const Model& model, History& hist, double dt, int k,
                            const SchemeOptions& opts) {
  if (k != 1 && k != 2) throw std::invalid_argument("resav1: only BDF1 and BDF2 are defined");
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  const BdfTableau tab = bdf_tableau(k);
  const Grid& grid = model.grid();
  const Symbol& l = model.linear_symbol();
  const Symbol& g = model.mobility_symbol();
  const double c = hist.scale_c;
  const double t_new = hist.t + dt;
  const long step = hist.step_index + 1;

  const Field star = backward(combine_levels(hist, tab.b, 0));
  const double xi = std::exp(combine_log(hist, tab.b) - model.energy_e1(star) / c);
  Field u = model.f_prime(star);
  u *= xi;
  SpectralField u_hat = forward(u);
  if (opts.dealias) dealias(u_hat);
  const SpectralField a_hat = combine_levels(hist, tab.a, 0);
  const auto f_hat = eval_forcing(opts, t_new, 1);

  SpectralField phi_hat(grid);
  for (std::size_t i = 0; i < phi_hat.size(); ++i) {
    Complex rhs = a_hat[i] / dt - g[i] * u_hat[i];
    if (f_hat) rhs += (*f_hat)[0][i];
    phi_hat[i] = rhs / (tab.alpha / dt + g[i] * l[i]);
  }
  check_finite_field(phi_hat, step);

  SpectralField mu_hat = apply_symbol(phi_hat, l);
  mu_hat += u_hat;
  const double diss = model.dissipation_k(mu_hat);
  SpectralField incr = tab.alpha * phi_hat;
  incr -= a_hat;
  const double lr_tilde = (combine_log(hist, tab.a) + spectral_inner(u_hat, incr) / c) / tab.alpha;

  const Field phi = backward(phi_hat);
  const double e1 = model.energy_e1(phi);
  RelaxOutcome rel{1.0, opts.gamma, 0};
  double lr = lr_tilde;
  if (opts.relaxed) {
    rel = relax_esav1(lr_tilde, e1 / c, diss / c, dt, opts.gamma, k == 1 ? 1.0 : 2.0 / 3.0);
    lr = blend_log(rel.theta0, lr_tilde, e1 / c);
  }
  if (!std::isfinite(lr)) throw NumericalError("step " + std::to_string(step) + ": ln r not finite");

  const Level& cur = hist.levels[0];
  const SpectralField* older = k == 2 ? &hist.levels[1].phi_hat[0] : nullptr;
  const double e_mod_old =
      esav1_modified(model, cur.phi_hat[0], older, cur.log_r, k == 2 ? hist.levels[1].log_r : 0.0, c);
  const double e_mod = esav1_modified(model, phi_hat, k == 2 ? &cur.phi_hat[0] : nullptr, lr,
                                      cur.log_r, c);

  if (opts.strict) {
    if (opts.relaxed && lr > e1 / c + kEnergySlack)
      raise_invariant(step, "ln r exceeds E_1/C after relaxation");
    if (!f_hat) check_energy_decay(e_mod, e_mod_old, -dt * (1.0 - opts.gamma) * diss, step);
  }

  StepReport rep;
  rep.step = step;
  rep.t = t_new;
  rep.theta0 = rel.theta0;
  rep.gamma = opts.gamma;
  rep.xi = xi;
  rep.log_r = lr;
  rep.e_original = 0.5 * quad(phi_hat, l) + e1;
  rep.e_modified = e_mod;
  rep.dissipation = diss;
  rep.mass = mean_of(phi_hat);
  rep.relax_case = rel.case_id;

  Level next;
  next.phi_hat.push_back(std::move(phi_hat));
  next.log_r = lr;
  push_level(hist, std::move(next), dt, static_cast<std::size_t>(k));
  return rep;
}

// -------------------------------------------------------- R-ESAV-2/BDFk

StepReport step_resav2_bdfk(const Model& model, History& hist, double dt, int k,
                            const SchemeOptions& opts) {
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  const BdfTableau tab = bdf_tableau(k);
  const Grid& grid = model.grid();
  const Symbol& l = model.linear_symbol();
  const Symbol& g = model.mobility_symbol();
  const double c = hist.scale_c;
  const double t_new = hist.t + dt;
  const long step = hist.step_index + 1;
  const double lr_old = hist.levels[0].log_r;

  const SpectralField star_hat = combine_levels(hist, tab.b, 0);
  const Field star = backward(star_hat);
  const double e_star = 0.5 * quad(star_hat, l) + model.energy_e1(star);
  SpectralField fp_hat = forward(model.f_prime(star));
  if (opts.dealias) dealias(fp_hat);
  SpectralField mu_star = apply_symbol(star_hat, l);
  mu_star += fp_hat;
  const double k_extrap = model.dissipation_k(mu_star);
  const auto f_hat = eval_forcing(opts, t_new, 1);
  const double forcing_term = f_hat ? spectral_inner((*f_hat)[0], mu_star) : 0.0;

  const double lr_tilde = esav2_r_update(lr_old, k_extrap / c, forcing_term / c, dt);
  const double xi = std::exp(lr_tilde - e_star / c);
  const double v = v_poly(k, xi);

  const SpectralField a_hat = combine_levels(hist, tab.a, 0);
  SpectralField phi_hat(grid);
  for (std::size_t i = 0; i < phi_hat.size(); ++i) {
    Complex rhs = a_hat[i] / dt - v * g[i] * fp_hat[i];
    if (f_hat) rhs += (*f_hat)[0][i];
    phi_hat[i] = rhs / (tab.alpha / dt + g[i] * l[i]);
  }
  check_finite_field(phi_hat, step);

  const Field phi = backward(phi_hat);
  const double e_new = 0.5 * quad(phi_hat, l) + model.energy_e1(phi);
  SpectralField mu_new = apply_symbol(phi_hat, l);
  mu_new += forward(model.f_prime(phi));
  const double k_new = model.dissipation_k(mu_new);

  RelaxOutcome rel{1.0, k_new > 0.0 ? k_extrap / k_new : 0.0, 0};
  double lr = lr_tilde;
  if (opts.relaxed) {
    rel = relax_esav2(lr_tilde, e_new / c, k_new / c, k_extrap / c, dt);
    lr = blend_log(rel.theta0, lr_tilde, e_new / c);
  }
  if (!std::isfinite(lr)) throw NumericalError("step " + std::to_string(step) + ": ln R not finite");

  if (opts.strict) {
    if (opts.relaxed) {
      if (lr > e_new / c + kEnergySlack) raise_invariant(step, "ln R exceeds E/C after relaxation");
      const double res = esav2_admissibility(lr, lr_tilde, k_new / c, k_extrap / c, rel.gamma, dt);
      if (res > kEnergySlack) raise_invariant(step, "admissibility equality residual " + std::to_string(res));
    }
    if (!f_hat && lr > lr_old + kEnergySlack) raise_invariant(step, "ln R increased");
  }

  StepReport rep;
  rep.step = step;
  rep.t = t_new;
  rep.theta0 = rel.theta0;
  rep.gamma = rel.gamma;
  rep.xi = xi;
  rep.log_r = lr;
  rep.e_original = e_new;
  rep.e_modified = c * lr;
  rep.dissipation = k_new;
  rep.mass = mean_of(phi_hat);
  rep.relax_case = rel.case_id;

  Level next;
  next.phi_hat.push_back(std::move(phi_hat));
  next.log_r = lr;
  push_level(hist, std::move(next), dt, static_cast<std::size_t>(k));
  return rep;
}

// ------------------------------------------------ multi-component R-ESAV-1/CN

StepReport step_resav1_cn_multi(const MultiComponentModel& model, History& hist, double dt,
                                const SchemeOptions& opts) {
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  const int m = model.components();
  const Grid& grid = model.grid();
  const Model& base = model.base();
  const Symbol& l = base.linear_symbol();
  const Symbol& g = base.mobility_symbol();
  const double c = hist.scale_c;
  const double t_new = hist.t + dt;
  const long step = hist.step_index + 1;
  const Level& cur = hist.levels[0];
  const Level& prev = hist.levels.size() > 1 ? hist.levels[1] : hist.levels[0];
  if (static_cast<int>(cur.phi_hat.size()) != m) throw DimensionMismatch("cn: component count");

  std::vector<Field> star;
  for (int i = 0; i < m; ++i) {
    SpectralField s = 1.5 * cur.phi_hat[i];
    s.axpy(-0.5, prev.phi_hat[i]);
    star.push_back(backward(s));
  }
  const double xi = std::exp(1.5 * cur.log_r - 0.5 * prev.log_r - model.energy_e1(star) / c);
  std::vector<SpectralField> u_hat;
  for (int i = 0; i < m; ++i) {
    Field u = base.f_prime(star[i]);
    u *= xi;
    u_hat.push_back(forward(u));
    if (opts.dealias) dealias(u_hat.back());
  }
  const auto f_hat = eval_forcing(opts, t_new, static_cast<std::size_t>(m));

  const auto& d = model.coupling();
  Eigen::MatrixXd dm(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) dm(i, j) = d[i][j];
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dm);
  const Eigen::MatrixXd& q = eig.eigenvectors();
  const Eigen::VectorXd& lam = eig.eigenvalues();

  std::vector<SpectralField> phi_hat(m, SpectralField(grid));
  Eigen::VectorXcd rhs(m), dphi(m), x(m);
  for (std::size_t s = 0; s < grid.spectral_size(); ++s) {
    const double h = 0.5 * dt * g[s] * l[s];
    for (int i = 0; i < m; ++i) dphi(i) = cur.phi_hat[i][s];
    const Eigen::VectorXcd dd = dm * dphi;
    for (int i = 0; i < m; ++i) {
      rhs(i) = dphi(i) - h * dd(i) - dt * g[s] * u_hat[i][s];
      if (f_hat) rhs(i) += dt * (*f_hat)[i][s];
    }
    Eigen::VectorXcd y = q.transpose() * rhs;
    for (int i = 0; i < m; ++i) y(i) /= 1.0 + h * lam(i);
    x = q * y;
    for (int i = 0; i < m; ++i) phi_hat[i][s] = x(i);
  }
  for (const auto& p : phi_hat) check_finite_field(p, step);

  // mu^{n+1/2} and the SAV increment
  std::vector<SpectralField> mid;
  for (int i = 0; i < m; ++i) {
    SpectralField s = 0.5 * phi_hat[i];
    s.axpy(0.5, cur.phi_hat[i]);
    mid.push_back(std::move(s));
  }
  double diss = 0.0;
  double incr = 0.0;
  for (int i = 0; i < m; ++i) {
    SpectralField mu(grid);
    for (int j = 0; j < m; ++j)
      if (d[i][j] != 0.0) mu.axpy(d[i][j], apply_symbol(mid[j], l));
    mu += u_hat[i];
    diss += base.dissipation_k(mu);
    incr += spectral_inner(u_hat[i], phi_hat[i] - cur.phi_hat[i]);
  }
  const double lr_tilde = cur.log_r + incr / c;

  std::vector<Field> phi;
  for (const auto& p : phi_hat) phi.push_back(backward(p));
  const double e1 = model.energy_e1(phi);
  RelaxOutcome rel{1.0, opts.gamma, 0};
  double lr = lr_tilde;
  if (opts.relaxed) {
    rel = relax_esav1(lr_tilde, e1 / c, diss / c, dt, opts.gamma, 1.0);
    lr = blend_log(rel.theta0, lr_tilde, e1 / c);
  }
  if (!std::isfinite(lr)) throw NumericalError("step " + std::to_string(step) + ": ln r not finite");

  const double quad_new = model.quadratic_energy(phi_hat);
  const double e_mod = quad_new + c * lr;
  if (opts.strict) {
    const double e_mod_old = model.quadratic_energy(cur.phi_hat) + c * cur.log_r;
    if (opts.relaxed && lr > e1 / c + kEnergySlack)
      raise_invariant(step, "ln r exceeds E_1/C after relaxation");
    if (!f_hat) check_energy_decay(e_mod, e_mod_old, -dt * (1.0 - opts.gamma) * diss, step);
  }

  StepReport rep;
  rep.step = step;
  rep.t = t_new;
  rep.theta0 = rel.theta0;
  rep.gamma = opts.gamma;
  rep.xi = xi;
  rep.log_r = lr;
  rep.e_original = quad_new + e1;
  rep.e_modified = e_mod;
  rep.dissipation = diss;
  for (const auto& p : phi_hat) rep.mass += mean_of(p);
  rep.relax_case = rel.case_id;

  Level next;
  next.phi_hat = std::move(phi_hat);
  next.log_r = lr;
  push_level(hist, std::move(next), dt, 2);
  return rep;
}

// ---------------------------------------------------------- R-MESAV-1/CN

StepReport step_rmesav1_cn(const VesicleModel& model, History& hist, double dt,
                           const SchemeOptions& opts) {
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  const Grid& grid = model.grid();
  const Symbol& l = model.linear_symbol();
  const Symbol& g = model.mobility_symbol();
  const double c = hist.scale_c;
  const double t_new = hist.t + dt;
  const long step = hist.step_index + 1;
  const Level& cur = hist.levels[0];
  const Level& prev = hist.levels.size() > 1 ? hist.levels[1] : hist.levels[0];

  SpectralField star_hat = 1.5 * cur.phi_hat[0];
  star_hat.axpy(-0.5, prev.phi_hat[0]);
  const Field star = backward(star_hat);
  const double xi1 =
      std::exp(1.5 * cur.log_r - 0.5 * prev.log_r - model.energy_e1_part(star) / c);
  const double xi2 =
      std::exp(1.5 * cur.log_r2 - 0.5 * prev.log_r2 - model.energy_e2(star) / c);
  SpectralField u1 = forward(model.f1_prime(star));
  SpectralField u2 = forward(model.f2_prime(star));
  u1 *= xi1;
  u2 *= xi2;
  if (opts.dealias) {
    dealias(u1);
    dealias(u2);
  }
  const SpectralField u_hat = u1 + u2;
  const auto f_hat = eval_forcing(opts, t_new, 1);

  SpectralField phi_hat(grid);
  for (std::size_t i = 0; i < phi_hat.size(); ++i) {
    const double h = 0.5 * g[i] * l[i];
    Complex rhs = cur.phi_hat[0][i] * (1.0 / dt - h) - g[i] * u_hat[i];
    if (f_hat) rhs += (*f_hat)[0][i];
    phi_hat[i] = rhs / (1.0 / dt + h);
  }
  check_finite_field(phi_hat, step);

  SpectralField mid = 0.5 * phi_hat;
  mid.axpy(0.5, cur.phi_hat[0]);
  SpectralField mu = apply_symbol(mid, l);
  mu += u_hat;
  const double diss = model.dissipation_k(mu);
  const SpectralField dphi = phi_hat - cur.phi_hat[0];
  const double lr1_tilde = cur.log_r + spectral_inner(u1, dphi) / c;
  const double lr2_tilde = cur.log_r2 + spectral_inner(u2, dphi) / c;

  const Field phi = backward(phi_hat);
  const double e1 = model.energy_e1_part(phi) / c;
  const double e2 = model.energy_e2(phi) / c;
  RelaxOutcome rel{1.0, opts.gamma, 0};
  double lr1 = lr1_tilde;
  double lr2 = lr2_tilde;
  if (opts.relaxed) {
    const double budget = dt * opts.gamma * diss / c;
    const double ch = std::exp(budget + lr1_tilde + lr2_tilde - e1 - e2);
    if (ch > 0.0) {
      rel = relax_mesav(std::expm1(lr1_tilde - e1), std::expm1(lr2_tilde - e2), ch);
      lr1 = blend_log(rel.theta0, lr1_tilde, e1);
      lr2 = blend_log(rel.theta0, lr2_tilde, e2);
    }
    // with a1, a2 near -1 the hatted quadratic loses the root to rounding
    if (ch == 0.0 || lr1 + lr2 > lr1_tilde + lr2_tilde + budget) {
      rel.theta0 = 1.0;
      lr1 = lr1_tilde;
      lr2 = lr2_tilde;
    }
    rel.gamma = opts.gamma;
  }
  if (!std::isfinite(lr1) || !std::isfinite(lr2))
    throw NumericalError("step " + std::to_string(step) + ": ln r not finite");

  const double quad_new = 0.5 * quad(phi_hat, l);
  const double e_mod = quad_new + c * (lr1 + lr2);
  if (opts.strict && !f_hat) {
    const double e_mod_old = 0.5 * quad(cur.phi_hat[0], l) + c * (cur.log_r + cur.log_r2);
    check_energy_decay(e_mod, e_mod_old, -dt * (1.0 - opts.gamma) * diss, step);
  }

  StepReport rep;
  rep.step = step;
  rep.t = t_new;
  rep.theta0 = rel.theta0;
  rep.gamma = opts.gamma;
  rep.xi = xi1;
  rep.log_r = lr1;
  rep.log_r2 = lr2;
  rep.e_original = quad_new + c * (e1 + e2);
  rep.e_modified = e_mod;
  rep.dissipation = diss;
  rep.mass = mean_of(phi_hat);
  rep.relax_case = rel.case_id;

  Level next;
  next.phi_hat.push_back(std::move(phi_hat));
  next.log_r = lr1;
  next.log_r2 = lr2;
  push_level(hist, std::move(next), dt, 2);
  return rep;
}

// ------------------------------------------------------- initial states

namespace {

History single_level(std::vector<SpectralField> phi_hat, double lr, double lr2, double c) {
  History h;
  Level lvl;
  lvl.phi_hat = std::move(phi_hat);
  lvl.log_r = lr;
  lvl.log_r2 = lr2;
  h.levels.push_back(std::move(lvl));
  h.scale_c = c;
  return h;
}

}  // namespace

History initial_history_esav1(const Model& model, const Field& phi0, const SchemeOptions& opts) {
  const double e1 = model.energy_e1(phi0);
  const double c = resolve_scale(opts, e1);
  return single_level({forward(phi0)}, e1 / c, 0.0, c);
}

History initial_history_esav2(const Model& model, const Field& phi0, const SchemeOptions& opts) {
  const double e = model.energy(phi0);
  const double c = resolve_scale(opts, e);
  return single_level({forward(phi0)}, e / c, 0.0, c);
}

History initial_history_multi(const MultiComponentModel& model, const std::vector<Field>& phi0,
                              const SchemeOptions& opts) {
  if (static_cast<int>(phi0.size()) != model.components())
    throw DimensionMismatch("initial state: component count mismatch");
  const double e1 = model.energy_e1(phi0);
  const double c = resolve_scale(opts, e1);
  std::vector<SpectralField> hat;
  for (const auto& p : phi0) hat.push_back(forward(p));
  return single_level(std::move(hat), e1 / c, 0.0, c);
}

History initial_history_mesav(const VesicleModel& model, const Field& phi0,
                              const SchemeOptions& opts) {
  const double e1 = model.energy_e1_part(phi0);
  const double e2 = model.energy_e2(phi0);
  const double c = resolve_scale(opts, std::abs(e1) + std::abs(e2));
  return single_level({forward(phi0)}, e1 / c, e2 / c, c);
}

// ---------------------------------------------------------------- kits

SchemeKit resav1_bdf_kit(ModelPtr model, int k, SchemeOptions opts) {
  if (k != 1 && k != 2) throw ConfigError("scheme", "resav1 is defined for BDF1 and BDF2 only");
  SchemeKit kit;
  kit.name = "resav1-bdf" + std::to_string(k);
  kit.order = k;
  kit.step = [model, opts](History& h, double dt, int order) {
    return step_resav1_bdfk(*model, h, dt, order, opts);
  };
  kit.describe = [model, k](const History& h) {
    const Level& cur = h.newest();
    const Field phi = backward(cur.phi_hat[0]);
    const double e1 = model->energy_e1(phi);
    const bool two = k == 2 && h.levels.size() > 1;
    StepReport rep;
    rep.step = h.step_index;
    rep.t = h.t;
    rep.theta0 = 0.0;
    rep.gamma = 0.0;
    rep.log_r = cur.log_r;
    rep.e_original = model->quadratic_energy(cur.phi_hat[0]) + e1;
    rep.e_modified = esav1_modified(*model, cur.phi_hat[0], two ? &h.levels[1].phi_hat[0] : nullptr,
                                    cur.log_r, two ? h.levels[1].log_r : 0.0, h.scale_c);
    rep.xi = std::exp(cur.log_r - e1 / h.scale_c);
    rep.mass = mean_of(cur.phi_hat[0]);
    return rep;
  };
  return kit;
}

SchemeKit resav2_bdf_kit(ModelPtr model, int k, SchemeOptions opts) {
  if (k < 1 || k > 4) throw ConfigError("scheme", "resav2 is defined for BDF1..BDF4");
  SchemeKit kit;
  kit.name = "resav2-bdf" + std::to_string(k);
  kit.order = k;
  kit.step = [model, opts](History& h, double dt, int order) {
    return step_resav2_bdfk(*model, h, dt, order, opts);
  };
  kit.describe = [model](const History& h) {
    const Level& cur = h.newest();
    const double e = model->energy(backward(cur.phi_hat[0]));
    StepReport rep;
    rep.step = h.step_index;
    rep.t = h.t;
    rep.theta0 = 0.0;
    rep.log_r = cur.log_r;
    rep.e_original = e;
    rep.e_modified = h.scale_c * cur.log_r;
    rep.xi = std::exp(cur.log_r - e / h.scale_c);
    rep.mass = mean_of(cur.phi_hat[0]);
    return rep;
  };
  return kit;
}

SchemeKit resav1_cn_kit(std::shared_ptr<const MultiComponentModel> model, SchemeOptions opts) {
  SchemeKit kit;
  kit.name = "resav1-cn";
  kit.order = 1;
  kit.step = [model, opts](History& h, double dt, int) {
    return step_resav1_cn_multi(*model, h, dt, opts);
  };
  kit.describe = [model](const History& h) {
    const Level& cur = h.newest();
    std::vector<Field> phi;
    for (const auto& p : cur.phi_hat) phi.push_back(backward(p));
    const double e1 = model->energy_e1(phi);
    StepReport rep;
    rep.step = h.step_index;
    rep.t = h.t;
    rep.theta0 = 0.0;
    rep.log_r = cur.log_r;
    rep.e_original = model->quadratic_energy(cur.phi_hat) + e1;
    rep.e_modified = model->quadratic_energy(cur.phi_hat) + h.scale_c * cur.log_r;
    rep.xi = std::exp(cur.log_r - e1 / h.scale_c);
    for (const auto& p : cur.phi_hat) rep.mass += mean_of(p);
    return rep;
  };
  return kit;
}

SchemeKit rmesav1_cn_kit(std::shared_ptr<const VesicleModel> model, SchemeOptions opts) {
  SchemeKit kit;
  kit.name = "rmesav1-cn";
  kit.order = 1;
  kit.step = [model, opts](History& h, double dt, int) {
    return step_rmesav1_cn(*model, h, dt, opts);
  };
  kit.describe = [model](const History& h) {
    const Level& cur = h.newest();
    const Field phi = backward(cur.phi_hat[0]);
    const double quad_e = model->quadratic_energy(cur.phi_hat[0]);
    const double e1 = model->energy_e1_part(phi);
    StepReport rep;
    rep.step = h.step_index;
    rep.t = h.t;
    rep.theta0 = 0.0;
    rep.log_r = cur.log_r;
    rep.log_r2 = cur.log_r2;
    rep.e_original = quad_e + e1 + model->energy_e2(phi);
    rep.e_modified = quad_e + h.scale_c * (cur.log_r + cur.log_r2);
    rep.xi = std::exp(cur.log_r - e1 / h.scale_c);
    rep.mass = mean_of(cur.phi_hat[0]);
    return rep;
  };
  return kit;
}

// ------------------------------------------------------------ bootstrap

std::vector<std::pair<Level, StepReport>> bootstrap(const History& start, const StepFn& step,
                                                    double dt, int k) {
  std::vector<std::pair<Level, StepReport>> out;
  if (k <= 1) return out;
  const int lower = k - 1;
  const long m = lower == 1 ? 1 : static_cast<long>(std::ceil(std::pow(dt, -1.0 / lower) - 1e-9));
  const double h = dt / static_cast<double>(m);

  History sub;
  sub.levels.push_back(start.newest());
  sub.t = start.t;
  sub.scale_c = start.scale_c;

  long idx = 0;
  auto take = [&](const Level& lvl, StepReport rep) {
    if (idx % m != 0) return;
    rep.step = start.step_index + idx / m;
    rep.t = start.t + static_cast<double>(idx / m) * dt;
    out.emplace_back(lvl, rep);
  };
  for (auto& [lvl, rep] : bootstrap(sub, step, h, lower)) {
    ++idx;
    push_level(sub, lvl, h, static_cast<std::size_t>(lower));
    take(lvl, rep);
  }
  while (idx < static_cast<long>(lower) * m) {
    StepReport rep = step(sub, h, lower);
    ++idx;
    take(sub.newest(), rep);
  }
  return out;
}

Stepper::Stepper(SchemeKit kit, History initial, double dt)
    : kit_(std::move(kit)), hist_(std::move(initial)), dt_(dt) {
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (hist_.levels.empty()) throw InvariantViolation("stepper: empty initial history");
}

StepReport Stepper::step() {
  const auto keep = static_cast<std::size_t>(std::max(kit_.order, 2));
  if (!bootstrapped_) {
    bootstrapped_ = true;
    if (kit_.order > 1 && hist_.levels.size() < static_cast<std::size_t>(kit_.order)) {
      for (auto& entry : bootstrap(hist_, kit_.step, dt_, kit_.order)) pending_.push_back(std::move(entry));
    }
  }
  if (!pending_.empty()) {
    auto [lvl, rep] = std::move(pending_.front());
    pending_.pop_front();
    push_level(hist_, std::move(lvl), dt_, keep);
    return rep;
  }
  return kit_.step(hist_, dt_, kit_.order);
}

}  // namespace resav
