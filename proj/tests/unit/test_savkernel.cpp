#include <doctest.h>

#include <cmath>
#include <random>

#include "resav/errors.hpp"
#include "resav/savkernel.hpp"

using namespace resav;

namespace {

// Smallest theta on a uniform grid of [0,1] accepted by pred.
template <class Pred>
double grid_min_theta(Pred pred, int points) {
  for (int i = 0; i <= points; ++i) {
    const double th = static_cast<double>(i) / points;
    if (pred(th)) return th;
  }
  return 2.0;
}

}  // namespace

TEST_CASE("BDF tableaux are exact on polynomials") {
  // alpha p(t_{n+1}) - sum a_j p(t_{n-j}) = dt p'(t_{n+1}) for deg p <= k, and
  // sum b_j p(t_{n-j}) = p(t_{n+1}) for deg p <= k - 1, with dt = 1, t_{n+1} = 0.
  for (int k = 1; k <= 4; ++k) {
    const BdfTableau tab = bdf_tableau(k);
    REQUIRE(tab.a.size() == static_cast<std::size_t>(k));
    REQUIRE(tab.b.size() == static_cast<std::size_t>(k));
    for (int deg = 0; deg <= k; ++deg) {
      double lhs = deg == 0 ? tab.alpha : 0.0;
      double ext = 0.0;
      for (int j = 0; j < k; ++j) {
        const double t = -1.0 - j;
        lhs -= tab.a[j] * std::pow(t, deg);
        ext += tab.b[j] * std::pow(t, deg);
      }
      const double deriv = deg == 1 ? 1.0 : 0.0;
      CHECK(lhs == doctest::Approx(deriv).epsilon(1e-13));
      if (deg < k) CHECK(ext == doctest::Approx(deg == 0 ? 1.0 : 0.0).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(bdf_tableau(5), std::invalid_argument);
  CHECK_THROWS_AS(bdf_tableau(0), std::invalid_argument);
}

TEST_CASE("pressure extrapolation weights are B_{k-1}") {
  CHECK(bdf_tableau(1).p == bdf_tableau(1).b);
  CHECK(bdf_tableau(2).p == bdf_tableau(1).b);
  CHECK(bdf_tableau(3).p == bdf_tableau(2).b);
  CHECK(bdf_tableau(4).p == bdf_tableau(3).b);
}

TEST_CASE("V_k stabilizers") {
  for (int k = 1; k <= 4; ++k) {
    CHECK(v_poly(k, 1.0) == doctest::Approx(1.0));
    CHECK(v_poly(k, 0.0) == 0.0);
    // 1 - V_k(xi) = (1 - xi)^k
    for (double xi : {0.3, 0.9, 1.1, 1.7}) CHECK(1.0 - v_poly(k, xi) == doctest::Approx(std::pow(1.0 - xi, k)));
  }
}

TEST_CASE("first-kind selector: cases and minimality") {
  const double dt = 0.01, gamma = 0.7;
  SUBCASE("r~ equal to exp(E1)") { CHECK(relax_esav1(0.4, 0.4, 1.0, dt, gamma, 1.0).case_id == 1); }
  SUBCASE("r~ above exp(E1) takes theta0 = 0") {
    const auto r = relax_esav1(0.5, 0.4, 1.0, dt, gamma, 1.0);
    CHECK(r.theta0 == 0.0);
    CHECK(r.case_id == 2);
  }
  SUBCASE("dissipation budget covers the gap") {
    const auto r = relax_esav1(0.4, 0.4 + 0.5 * dt * gamma, 1.0, dt, gamma, 1.0);
    CHECK(r.theta0 == 0.0);
    CHECK(r.case_id == 3);
  }
  SUBCASE("interior theta0 against grid search") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const double lrt = 2.0 * u(gen) - 1.0;
      const double e1 = lrt + 0.5 * u(gen) + 1e-3;
      const double diss = 3.0 * u(gen);
      const double of = trial % 2 ? 1.0 : 2.0 / 3.0;
      const auto r = relax_esav1(lrt, e1, diss, dt, gamma, of);
      const double lr = blend_log(r.theta0, lrt, e1);
      CHECK(esav1_admissibility(lr, lrt, diss, dt, gamma, of) <= 1e-10);
      const double g = grid_min_theta(
          [&](double th) {
            return std::log(th * std::exp(lrt) + (1 - th) * std::exp(e1)) - lrt <= of * dt * gamma * diss + 1e-15;
          },
          20000);
      CHECK(std::abs(g - r.theta0) <= 1e-4);
    }
  }
  CHECK_THROWS_AS(relax_esav1(0.0, 0.1, -1.0, dt, gamma, 1.0), InvariantViolation);
  CHECK_THROWS_AS(relax_esav1(NAN, 0.1, 1.0, dt, gamma, 1.0), NumericalError);
}

TEST_CASE("second-kind selector satisfies the admissibility equality") {
  std::mt19937 gen(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double dt = 0.02;
  int case4 = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const double lrt = 2.0 * u(gen) - 1.0;
    const double e = lrt + 0.2 * (2.0 * u(gen) - 1.0);
    const double kn = 5.0 * u(gen) + 1e-3;
    const double kx = 5.0 * u(gen);
    const auto r = relax_esav2(lrt, e, kn, kx, dt);
    CHECK(r.theta0 >= 0.0);
    CHECK(r.theta0 <= 1.0);
    CHECK(r.gamma >= 0.0);
    const double lr = blend_log(r.theta0, lrt, e);
    CHECK(esav2_admissibility(lr, lrt, kn, kx, r.gamma, dt) <= 1e-10);
    if (r.case_id == 4) ++case4;
  }
  CHECK(case4 > 0);
}

TEST_CASE("second-kind selector with vanishing dissipation") {
  const auto rest = relax_esav2(0.0, 0.0, 0.0, 0.0, 0.1);
  CHECK(rest.theta0 == 0.0);
  CHECK(rest.gamma == 0.0);
  CHECK_THROWS_AS(relax_esav2(0.1, 0.0, 0.0, 0.0, 0.1), DegenerateDissipation);
}

TEST_CASE("two-SAV selector against grid search") {
  std::mt19937 gen(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double d1 = u(gen), d2 = u(gen), s = 0.5 * (u(gen) + 1.0);
    const double a1 = std::expm1(d1), a2 = std::expm1(d2), c = std::exp(s + d1 + d2);
    const auto r = relax_mesav(a1, a2, c);
    const double g = grid_min_theta([&](double th) { return (1 + a1 * th) * (1 + a2 * th) - c <= 0.0; }, 100000);
    CHECK(std::abs(r.theta0 - g) <= 1e-4);
  }
  CHECK_THROWS_AS(relax_mesav(0.5, 0.5, 1.0), InconsistentCoefficients);
  CHECK_THROWS_AS(relax_mesav(0.0, 0.0, 0.0), InconsistentCoefficients);
  CHECK(relax_mesav(0.0, 0.0, 1.0).theta0 == 0.0);
}

TEST_CASE("log blend") {
  CHECK(blend_log(0.0, 1.0, 2.0) == 2.0);
  CHECK(blend_log(1.0, 1.0, 2.0) == 1.0);
  CHECK(blend_log(0.25, 1.0, 2.0) == doctest::Approx(std::log(0.25 * std::exp(1.0) + 0.75 * std::exp(2.0))));
  // no overflow for large logs
  CHECK(blend_log(0.5, 800.0, 800.0) == doctest::Approx(800.0));
}

TEST_CASE("explicit R update") {
  CHECK(esav2_r_update(0.3, 2.0, 0.5, 0.1) == doctest::Approx(0.3 - std::log(1.15)));
  CHECK(esav2_r_update(0.3, 0.0, 0.0, 0.1) == 0.3);
  CHECK_THROWS_AS(esav2_r_update(0.0, 0.0, 20.0, 0.1), StepSizeError);
}
