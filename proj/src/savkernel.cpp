#include "resav/savkernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resav/errors.hpp"

namespace resav {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw NumericalError(std::string(name) + " is not finite");
}

double clamp_unit(double theta, const char* where) {
  if (theta < -kClampSlack || theta > 1.0 + kClampSlack || !std::isfinite(theta))
    throw InvariantViolation(std::string(where) + ": theta0 = " + std::to_string(theta) +
                             " outside [0,1]");
  return std::clamp(theta, 0.0, 1.0);
}

double clamp_nonneg(double g, const char* where) {
  if (g < -kClampSlack || !std::isfinite(g))
    throw InvariantViolation(std::string(where) + ": gamma = " + std::to_string(g) +
                             " is negative");
  return std::max(g, 0.0);
}

}  // namespace

BdfTableau bdf_tableau(int k) {
  switch (k) {
    case 1:
      return {1, 1.0, {1.0}, {1.0}, {1.0}};
    case 2:
      return {2, 1.5, {2.0, -0.5}, {2.0, -1.0}, {1.0}};
    case 3:
      return {3, 11.0 / 6.0, {3.0, -1.5, 1.0 / 3.0}, {3.0, -3.0, 1.0}, {2.0, -1.0}};
    case 4:
      return {4,
              25.0 / 12.0,
              {4.0, -3.0, 4.0 / 3.0, -0.25},
              {4.0, -6.0, 4.0, -1.0},
              {3.0, -3.0, 1.0}};
    default:
      throw std::invalid_argument("bdf_tableau: unsupported order " + std::to_string(k));
  }
}

double v_poly(int k, double xi) {
  switch (k) {
    case 1:
      return xi;
    case 2:
      return xi * (2.0 - xi);
    case 3:
      return xi * (3.0 - 3.0 * xi + xi * xi);
    case 4:
      return xi * (2.0 - xi) * (2.0 - 2.0 * xi + xi * xi);
    default:
      throw std::invalid_argument("v_poly: unsupported order " + std::to_string(k));
  }
}

RelaxOutcome relax_esav1(double log_r_tilde, double e1_new, double dissipation, double dt,
                         double gamma, double order_factor) {
  require_finite(log_r_tilde, "relax_esav1: log_r_tilde");
  require_finite(e1_new, "relax_esav1: e1_new");
  require_finite(dissipation, "relax_esav1: dissipation");
  if (dissipation < 0.0) throw InvariantViolation("relax_esav1: negative dissipation");
  if (!(dt > 0.0)) throw NumericalError("relax_esav1: dt must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw NumericalError("relax_esav1: gamma outside [0,1]");

  const double d = log_r_tilde - e1_new;
  if (d == 0.0) return {0.0, gamma, 1};
  if (d > 0.0) return {0.0, gamma, 2};
  const double log_s = order_factor * dt * gamma * dissipation + log_r_tilde;
  const double ds = log_s - e1_new;
  if (ds >= 0.0) return {0.0, gamma, 3};
  const double theta = std::expm1(ds) / std::expm1(d);
  return {clamp_unit(theta, "relax_esav1"), gamma, 4};
}

RelaxOutcome relax_mesav(double a1, double a2, double c) {
  require_finite(a1, "relax_mesav: a_hat1");
  require_finite(a2, "relax_mesav: a_hat2");
  require_finite(c, "relax_mesav: c_hat");
  if (!(c > 0.0)) throw InconsistentCoefficients("relax_mesav: c_hat must be positive");

  const double qa = a1 * a2;
  const double qb = a1 + a2;
  const double qc = 1.0 - c;
  const double f1 = (1.0 + a1) * (1.0 + a2) - c;
  if (f1 > 1e-10 * std::max(1.0, c))
    throw InconsistentCoefficients("relax_mesav: f(1) = " + std::to_string(f1) + " > 0");

  if (a1 == 0.0 && a2 == 0.0) return {0.0, 0.0, 1};
  if (a1 > 0.0 && a2 > 0.0) return {0.0, 0.0, 2};
  // qb^2 - 4 qa qc rearranged; no cancellation when a1 a2 > 0
  const double disc = std::max(0.0, (a1 - a2) * (a1 - a2) + 4.0 * qa * c);
  const double sq = std::sqrt(disc);
  if (a1 < 0.0 && a2 < 0.0) {
    // smaller root; qb < 0 so -qb + sq has no cancellation
    const double theta = 2.0 * qc / (sq - qb);
    return {clamp_unit(std::max(0.0, theta), "relax_mesav"), 0.0, 3};
  }
  if (qa < 0.0) {
    if (qc <= 0.0) return {0.0, 0.0, 4};
    // larger root of a concave parabola with f(0) > 0 >= f(1)
    const double theta = qb >= 0.0 ? (qb + sq) / (-2.0 * qa) : 2.0 * qc / (sq - qb);
    return {clamp_unit(theta, "relax_mesav"), 0.0, 5};
  }
  if (qb > 0.0) return {0.0, 0.0, 6};
  const double theta = std::max(0.0, (c - 1.0) / qb);
  return {clamp_unit(theta, "relax_mesav"), 0.0, 7};
}

RelaxOutcome relax_esav2(double log_r_tilde, double e_new, double k_new, double k_extrap,
                         double dt) {
  require_finite(log_r_tilde, "relax_esav2: log_r_tilde");
  require_finite(e_new, "relax_esav2: e_new");
  require_finite(k_new, "relax_esav2: k_new");
  require_finite(k_extrap, "relax_esav2: k_extrap");
  if (k_new < 0.0 || k_extrap < 0.0) throw InvariantViolation("relax_esav2: negative dissipation");
  if (!(dt > 0.0)) throw NumericalError("relax_esav2: dt must be positive");

  const double d = log_r_tilde - e_new;
  // (rho - 1)/rho = -expm1(-d)
  const double excess = -std::expm1(-d);
  const bool case4 = d < 0.0 && excess + dt * k_extrap < 0.0;
  if (case4) {
    const double theta = 1.0 - dt * k_extrap / std::expm1(-d);
    return {clamp_unit(theta, "relax_esav2"), 0.0, 4};
  }
  const int id = d == 0.0 ? 1 : (d > 0.0 ? 2 : 3);
  if (k_new == 0.0) {
    const double residual = excess + dt * k_extrap;
    if (std::abs(residual) <= 1e-14) return {0.0, 0.0, id};
    throw DegenerateDissipation("relax_esav2: K(phi^{n+1}) = 0 with residual " +
                                std::to_string(residual));
  }
  const double gamma = excess / (dt * k_new) + k_extrap / k_new;
  return {0.0, clamp_nonneg(gamma, "relax_esav2"), id};
}

double blend_log(double theta0, double log_r_tilde, double e_new) {
  if (theta0 == 0.0) return e_new;
  if (theta0 == 1.0) return log_r_tilde;
  const double m = std::max(log_r_tilde, e_new);
  return m + std::log(theta0 * std::exp(log_r_tilde - m) + (1.0 - theta0) * std::exp(e_new - m));
}

double esav2_r_update(double log_r_prev, double k_extrap, double forcing_term, double dt) {
  const double x = dt * (k_extrap - forcing_term);
  if (!(1.0 + x > 0.0))
    throw StepSizeError("esav2_r_update: 1 + dt (K - F) = " + std::to_string(1.0 + x) +
                        " <= 0; reduce dt");
  return log_r_prev - std::log1p(x);
}

double esav1_admissibility(double log_r_new, double log_r_tilde, double dissipation, double dt,
                           double gamma, double order_factor) {
  return (log_r_new - log_r_tilde) - order_factor * dt * gamma * dissipation;
}

double esav2_admissibility(double log_r_new, double log_r_tilde, double k_new,
                           double k_extrap, double gamma, double dt) {
  // (R - R~)/R~ = dt (K_extrap - gamma K_new)
  const double lhs = std::expm1(log_r_new - log_r_tilde);
  const double rhs = dt * (k_extrap - gamma * k_new);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

}  // namespace resav
