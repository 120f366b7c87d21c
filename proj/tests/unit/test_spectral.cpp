#include <doctest.h>

#include <cmath>
#include <numbers>

#include "resav/errors.hpp"
#include "resav/spectral.hpp"
#include "support.hpp"

using namespace resav;
using std::numbers::pi;

namespace {

Field fill(const Grid& g, double (*fn)(double, double)) {
  const auto x = g.coordinates(0);
  const auto y = g.coordinates(1);
  Field f(g);
  std::size_t n = 0;
  for (double xi : x)
    for (double yj : y) f[n++] = fn(xi, yj);
  return f;
}

}  // namespace

TEST_CASE("grid rejects odd, small or non-positive shapes") {
  CHECK_THROWS(Grid({7, 8}, {1.0, 1.0}));
  CHECK_THROWS(Grid({2, 8}, {1.0, 1.0}));
  CHECK_THROWS(Grid({8, 8}, {1.0, -1.0}));
  CHECK_THROWS(Grid({8, 8}, {1.0}));
  CHECK_THROWS(Grid({4, 4, 4, 4}, {1, 1, 1, 1}));
}

TEST_CASE("grid wavenumbers follow FFT ordering") {
  Grid g({8}, {2.0 * pi});
  const auto k = g.wavenumbers(0);
  const double expect[] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (int i = 0; i < 8; ++i) CHECK(k[i] == doctest::Approx(expect[i]));
  CHECK(g.measure() == doctest::Approx(2.0 * pi));
  CHECK(g.spectral_size() == 5);
}

TEST_CASE("transform round trip is exact to rounding") {
  Grid g({16, 12}, {1.0, 3.0});
  const Field f = testing::random_noise(g, 3);
  const Field back = backward(forward(f));
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-13));
}

TEST_CASE("spectral derivative matches the analytic derivative") {
  Grid g({32, 32}, {2.0, 2.0});
  const Field f = fill(g, [](double x, double y) { return std::sin(pi * x) * std::cos(2 * pi * y); });
  const Field dx = derivative(f, 0);
  const Field dy = derivative(f, 1);
  const Field ex = fill(g, [](double x, double y) { return pi * std::cos(pi * x) * std::cos(2 * pi * y); });
  const Field ey = fill(g, [](double x, double y) { return -2 * pi * std::sin(pi * x) * std::sin(2 * pi * y); });
  CHECK(l2_norm(dx - ex) < 1e-11);
  CHECK(l2_norm(dy - ey) < 1e-11);
}

TEST_CASE("laplacian of exp(sin x) against its closed form") {
  Grid g({64}, {2.0 * pi});
  Field f(g);
  Field lap(g);
  const auto x = g.coordinates(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = std::sin(x[i]), c = std::cos(x[i]);
    f[i] = std::exp(s);
    lap[i] = std::exp(s) * (c * c - s);
  }
  const Field got = backward(apply_symbol(forward(f), laplacian_symbol(g)));
  CHECK(l2_norm(got - lap) < 1e-12);
}

TEST_CASE("Parseval inner product equals collocation quadrature") {
  for (auto shape : {std::vector<int>{16}, std::vector<int>{8, 10}, std::vector<int>{6, 8, 4}}) {
    Grid g(shape, std::vector<double>(shape.size(), 1.7));
    const Field a = testing::random_noise(g, 1);
    const Field b = testing::random_noise(g, 2);
    CHECK(spectral_inner(forward(a), forward(b)) == doctest::Approx(inner_product(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("gradient norm matches finite sum of derivative norms") {
  Grid g({16, 16}, {1.0, 2.0});
  const Field f = testing::random_smooth(g, 4);
  double direct = 0.0;
  for (int a = 0; a < 2; ++a) {
    const Field d = derivative(f, a);
    direct += inner_product(d, d);
  }
  CHECK(grad_norm_sq(f) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("diagonal solve: singular mean mode") {
  Grid g({8, 8}, {1.0, 1.0});
  const auto sym = laplacian_symbol(g);
  Field rhs = testing::random_noise(g, 5);
  CHECK_THROWS_AS(solve_diagonal(forward(rhs), sym), SingularSolve);
  const SpectralField x = solve_diagonal(forward(rhs), sym, ZeroMode::mean_free);
  CHECK(std::abs(x[0]) == 0.0);
  const SpectralField back = apply_symbol(x, sym);
  for (std::size_t i = 1; i < back.size(); ++i)
    if (sym[i] != 0.0) CHECK(std::abs(back[i] - forward(rhs)[i]) < 1e-10);
}

TEST_CASE("Leray projection") {
  Grid g({32, 32}, {2 * pi, 2 * pi});
  SUBCASE("shear flow is already divergence free") {
    const Field u = fill(g, [](double, double y) { return std::sin(y); });
    const Field v(g);
    auto p = leray_project({forward(u), forward(v)});
    CHECK(l2_norm(backward(p[0]) - u) < 1e-13);
    CHECK(l2_norm(backward(p[1])) < 1e-13);
  }
  SUBCASE("gradient fields are removed") {
    const Field psi = fill(g, [](double x, double y) { return std::cos(x) * std::sin(2 * y); });
    auto p = leray_project({forward(derivative(psi, 0)), forward(derivative(psi, 1))});
    CHECK(l2_norm(backward(p[0])) < 1e-12);
    CHECK(l2_norm(backward(p[1])) < 1e-12);
  }
  SUBCASE("idempotent, divergence free, mean preserved") {
    Field u = testing::random_noise(g, 6);
    Field v = testing::random_noise(g, 7);
    for (double& x : u.values()) x += 0.3;
    auto p = leray_project({forward(u), forward(v)});
    CHECK(relative_divergence(p) < 1e-12);
    CHECK(std::abs(p[0][0] - forward(u)[0]) < 1e-12);
    auto q = leray_project(p);
    for (int c = 0; c < 2; ++c) CHECK(l2_norm(backward(q[c]) - backward(p[c])) < 1e-12);
  }
}

TEST_CASE("two-thirds rule mask") {
  Grid g({12}, {1.0});
  SpectralField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0;
  dealias(f);
  // stored modes m = 0..6; kept when 3|m| < 12
  for (std::size_t m = 0; m < f.size(); ++m) CHECK(std::abs(f[m]) == (3 * m < 12 ? 1.0 : 0.0));
}

TEST_CASE("field arithmetic refuses mismatched grids") {
  Grid a({8, 8}, {1.0, 1.0});
  Grid b({8, 8}, {2.0, 1.0});
  Field fa(a);
  Field fb(b);
  CHECK_THROWS(fa += fb);
  CHECK(Grid({8, 8}, {1.0, 1.0}) == a);
}
