#pragma once

// Log-space exponential SAV bookkeeping: BDF tableaux, V_k stabilizers and
// the three relaxation selectors.

#include <vector>

namespace resav {

/// Slack absorbed by clamping theta0 into [0,1] and gamma into [0,inf).
inline constexpr double kClampSlack = 1e-12;

/// ln r (or ln R) together with its energy scale C, r = exp(E / C).
struct LogSav {
  double log_r = 0.0;
  double scale_c = 1.0;
};

/// alpha_k phi^{n+1} - A_k(phi^n) and B_k(phi^n) weights, newest level first.
struct BdfTableau {
  int order = 1;
  double alpha = 1.0;
  std::vector<double> a;  ///< A_k weights, sum to alpha
  std::vector<double> b;  ///< B_k extrapolation weights, sum to 1
  std::vector<double> p;  ///< pressure extrapolation (B_1 for k=1, else B_{k-1})
};

BdfTableau bdf_tableau(int k);

/// V_1..V_4 stabilizer polynomials.
double v_poly(int k, double xi);

struct RelaxOutcome {
  double theta0 = 1.0;
  double gamma = 0.0;
  int case_id = 0;
};

/// First-kind selector. e1_new is E_1(phi^{n+1}) / C and dissipation is the
/// (already 1/C scaled) rate (G mu, mu). order_factor: 1 for BDF1 and CN,
/// 2/3 for BDF2.
RelaxOutcome relax_esav1(double log_r_tilde, double e1_new, double dissipation, double dt,
                         double gamma, double order_factor);

/// Two-SAV selector on the hatted quadratic
///   f(theta) = a1 a2 theta^2 + (a1 + a2) theta + 1 - c <= 0,
/// a_i = expm1(ln r~_i - E_i), c = exp(dt gamma D + ln r~_1 + ln r~_2 - E_1 - E_2).
RelaxOutcome relax_mesav(double a_hat1, double a_hat2, double c_hat);

/// Second-kind selector; returns theta0 and gamma.
RelaxOutcome relax_esav2(double log_r_tilde, double e_new, double k_new, double k_extrap,
                         double dt);

/// ln(theta0 r~ + (1 - theta0) exp(e_new)) without overflow.
double blend_log(double theta0, double log_r_tilde, double e_new);

/// ln R~ from (R~ - R^n)/dt = -R~ (K - F).
double esav2_r_update(double log_r_prev, double k_extrap, double forcing_term, double dt);

/// Residual of the first-kind admissibility inequality (<= 0 when admissible).
double esav1_admissibility(double log_r_new, double log_r_tilde, double dissipation,
                           double dt, double gamma, double order_factor);

/// Relative residual of the second-kind admissibility equality.
double esav2_admissibility(double log_r_new, double log_r_tilde, double k_new,
                           double k_extrap, double gamma, double dt);

}  // namespace resav
