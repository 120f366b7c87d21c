#include "resav/harness/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "resav/models.hpp"
#include "resav/vesicle.hpp"

namespace resav::harness {

namespace {

using std::numbers::pi;

template <class Fn>
Field fill_2d(const Grid& grid, Fn fn) {
  const auto x = grid.coordinates(0);
  const auto y = grid.coordinates(1);
  Field f(grid);
  std::size_t n = 0;
  for (double xi : x)
    for (double yj : y) f[n++] = fn(xi, yj);
  return f;
}

template <class Fn>
Field fill_3d(const Grid& grid, Fn fn) {
  const auto x = grid.coordinates(0);
  const auto y = grid.coordinates(1);
  const auto z = grid.coordinates(2);
  Field f(grid);
  std::size_t n = 0;
  for (double xi : x)
    for (double yj : y)
      for (double zk : z) f[n++] = fn(xi, yj, zk);
  return f;
}

ModelPtr make_model(const RunConfig& cfg, const Grid& grid) {
  if (cfg.model == "ac") return std::make_shared<AllenCahn>(grid, cfg.param("sigma0"));
  if (cfg.model == "ch")
    return std::make_shared<CahnHilliard>(grid, cfg.param("sigma0"), cfg.param("mobility"),
                                          cfg.param("epsilon"));
  if (cfg.model == "pfc")
    return std::make_shared<PhaseFieldCrystal>(grid, cfg.param("zeta"), cfg.param("epsilon"),
                                               cfg.param("mobility"));
  throw ConfigError("model", "not a gradient-flow model: " + cfg.model);
}

Field initial_phase(const RunConfig& cfg, const Grid& grid, int component) {
  const auto& init = cfg.init;
  if (init == "manufactured") return gradient_flow_exact(grid, 0.0);
  if (init == "star") return star_shape(grid, cfg.param("alpha"));
  if (init == "random")
    return random_field(grid, cfg.seed + static_cast<std::uint64_t>(component), cfg.param("amplitude"),
                        cfg.param("phi_bar"));
  if (init == "circles") {
    const double eps = cfg.params.count("epsilon") ? cfg.param("epsilon") : std::sqrt(cfg.param("sigma0"));
    return circle_array(grid, eps);
  }
  if (init == "crystal") return crystal_patches(grid, cfg.param("phi_bar"), cfg.param("amplitude"), 0.66);
  if (init == "four_spheres") return four_spheres(grid, cfg.param("epsilon"));
  if (init == "constant") {
    Field f(grid);
    for (double& v : f.values()) v = cfg.param("phi_bar");
    return f;
  }
  throw ConfigError("init", "'" + init + "' does not describe a phase field");
}

}  // namespace

Grid make_grid(const RunConfig& cfg) { return Grid(cfg.n, cfg.l, cfg.origin); }

std::vector<Field> level_fields(const Level& level) {
  std::vector<Field> out;
  for (const auto& p : level.phi_hat) out.push_back(backward(p));
  return out;
}

Problem build_problem(const RunConfig& cfg) {
  RunConfig c = cfg;
  validate(c);
  Problem prob{make_grid(c), {}, {}, false, {}};
  const Grid& grid = prob.grid;

  if (c.model == "ns") {
    FlowOptions fo;
    fo.nu = c.param("nu");
    fo.relaxed = c.relaxed;
    fo.strict = c.strict;
    fo.dealias = c.dealias;
    fo.scale_c = c.scale_c;
    const bool scheme2 = c.scheme_family() == "ns-scheme2";
    if (c.ns_energy == "enstrophy" || (c.ns_energy == "auto" && scheme2 && !c.forced()))
      fo.energy = NsEnergy::enstrophy;
    std::vector<Field> u0;
    std::optional<Field> p0;
    if (c.forced()) {
      fo.forcing = flow_forcing(grid, fo.nu);
      u0 = flow_exact_velocity(grid, 0.0);
      p0 = flow_exact_pressure(grid, 0.0);
      prob.exact = [grid](double t) { return flow_exact_velocity(grid, t); };
    } else {
      u0 = shear_layer_init(grid, c.param("shear_sigma"), c.param("shear_eps"));
    }
    prob.flow = true;
    prob.initial = initial_history_flow(u0, fo, p0 ? &*p0 : nullptr);
    prob.kit = ns_kit(scheme2 ? NsScheme::projection : NsScheme::pressure_correction,
                      c.scheme_order(), fo);
    return prob;
  }

  SchemeOptions so;
  so.relaxed = c.relaxed;
  so.gamma = c.gamma;
  so.scale_c = c.scale_c;
  so.strict = c.strict;
  so.dealias = c.dealias;

  if (c.model == "pfvm") {
    const Field phi0 = initial_phase(c, grid, 0);
    auto model = std::make_shared<VesicleModel>(grid, c.param("epsilon"), c.param("sigma1"),
                                                c.param("sigma2"), c.param("mobility"), phi0);
    prob.initial = initial_history_mesav(*model, phi0, so);
    prob.kit = rmesav1_cn_kit(model, so);
    return prob;
  }

  ModelPtr model = make_model(c, grid);
  if (c.forced()) prob.exact = [grid, m = c.components](double t) {
    return std::vector<Field>(m, gradient_flow_exact(grid, t));
  };

  if (c.scheme == "resav1-cn") {
    auto multi = std::make_shared<MultiComponentModel>(model, c.coupling);
    if (c.forced()) so.forcing = gradient_flow_forcing(model, c.coupling);
    std::vector<Field> phi0;
    for (int i = 0; i < c.components; ++i) phi0.push_back(initial_phase(c, grid, i));
    prob.initial = initial_history_multi(*multi, phi0, so);
    prob.kit = resav1_cn_kit(multi, so);
    return prob;
  }

  if (c.forced()) so.forcing = gradient_flow_forcing(model, {});
  const Field phi0 = initial_phase(c, grid, 0);
  const int k = c.scheme_order();
  if (c.scheme_family() == "resav1") {
    prob.initial = initial_history_esav1(*model, phi0, so);
    prob.kit = resav1_bdf_kit(model, k, so);
  } else {
    prob.initial = initial_history_esav2(*model, phi0, so);
    prob.kit = resav2_bdf_kit(model, k, so);
  }
  return prob;
}

// ----------------------------------------------------------- initial data

Field star_shape(const Grid& grid, double alpha) {
  if (grid.dim() != 2) throw DimensionMismatch("star shape: 2D grid required");
  const double w = std::sqrt(2.0 * alpha);
  return fill_2d(grid, [w](double x, double y) {
    const double lam = std::atan2(y - 0.5, x - 0.5);
    const double rho = std::hypot(x - 0.5, y - 0.5);
    return std::tanh((1.5 + 1.2 * std::cos(6.0 * lam) - 2.0 * pi * rho) / w);
  });
}

Field random_field(const Grid& grid, std::uint64_t seed, double amplitude, double mean) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field f(grid);
  for (double& v : f.values()) v = dist(gen);
  const double m = f.mean();
  for (double& v : f.values()) v = mean + amplitude * (v - m);
  return f;
}

Field circle_array(const Grid& grid, double eps) {
  if (grid.dim() != 2) throw DimensionMismatch("circles: 2D grid required");
  const double w = std::sqrt(2.0) * eps;
  return fill_2d(grid, [w](double x, double y) {
    double s = 80.0;
    for (int m = 1; m <= 9; ++m)
      for (int n = 1; n <= 9; ++n) s -= std::tanh((std::hypot(x - 0.2 * m, y - 0.2 * n) - 0.085) / w);
    return s;
  });
}

Field crystal_patches(const Grid& grid, double phi_bar, double a1, double a2) {
  if (grid.dim() != 2) throw DimensionMismatch("crystal: 2D grid required");
  const double scale = grid.lengths()[0] / 800.0;
  const double half = 0.5 * 40.0 * std::max(scale, 0.25);
  const double cx[] = {200, 150, 350, 600, 550};
  const double cy[] = {200, 600, 400, 300, 700};
  const double rho[] = {-0.75 * pi, -0.25 * pi, 0.0, 0.25 * pi, 0.75 * pi};
  const double ox = grid.origin()[0];
  const double oy = grid.origin()[1];
  return fill_2d(grid, [&](double x, double y) {
    for (int j = 0; j < 5; ++j) {
      if (std::abs(x - ox - cx[j] * scale) > half || std::abs(y - oy - cy[j] * scale) > half) continue;
      const double xj = x * std::sin(rho[j]) + y * std::cos(rho[j]);
      const double yj = -x * std::cos(rho[j]) + y * std::sin(rho[j]);
      return phi_bar + a1 * (std::cos(a2 / std::sqrt(3.0) * yj) * std::cos(a2 * xj) -
                             0.5 * std::cos(2.0 * a2 / std::sqrt(3.0) * yj));
    }
    return phi_bar;
  });
}

Field four_spheres(const Grid& grid, double eps) {
  if (grid.dim() != 3) throw DimensionMismatch("four spheres: 3D grid required");
  const double w = std::sqrt(2.0) * eps;
  const double r = pi / 6.0;
  const double yc[] = {-pi / 4.0, pi / 4.0, -3.0 * pi / 4.0, 3.0 * pi / 4.0};
  return fill_3d(grid, [&](double x, double y, double z) {
    double s = 3.0;
    for (double c : yc) s += std::tanh((r - std::sqrt(x * x + (y - c) * (y - c) + z * z)) / w);
    return s;
  });
}

// ---------------------------------------------------- manufactured fields

Field gradient_flow_exact(const Grid& grid, double t) {
  const double st = std::sin(t);
  return fill_2d(grid, [st](double x, double y) {
    return std::exp(std::sin(pi * x) * std::sin(pi * y)) * st;
  });
}

Forcing gradient_flow_forcing(ModelPtr model, std::vector<std::vector<double>> coupling) {
  const Grid grid = model->grid();
  const SpectralField base = forward(gradient_flow_exact(grid, 0.5 * pi));
  return [model, coupling, base, grid](double t) {
    const std::size_t m = coupling.empty() ? 1 : coupling.size();
    double dsum = 1.0;
    std::vector<SpectralField> out;
    Field phi = backward(base);
    phi *= std::sin(t);
    const SpectralField nl = forward(model->f_prime(phi));
    const Symbol& l = model->linear_symbol();
    const Symbol& g = model->mobility_symbol();
    for (std::size_t i = 0; i < m; ++i) {
      if (!coupling.empty()) {
        dsum = 0.0;
        for (double d : coupling[i]) dsum += d;
      }
      SpectralField f(grid);
      for (std::size_t s = 0; s < f.size(); ++s)
        f[s] = std::cos(t) * base[s] + g[s] * (dsum * l[s] * std::sin(t) * base[s] + nl[s]);
      out.push_back(std::move(f));
    }
    return out;
  };
}

std::vector<Field> flow_exact_velocity(const Grid& grid, double t) {
  const double et = std::exp(t);
  auto sq = [](double v) { return v * v; };
  return {fill_2d(grid, [&](double x, double y) { return et * sq(std::sin(pi * x)) * std::sin(2 * pi * y); }),
          fill_2d(grid, [&](double x, double y) { return -et * std::sin(2 * pi * x) * sq(std::sin(pi * y)); })};
}

Field flow_exact_pressure(const Grid& grid, double t) {
  const double et = std::exp(t);
  return fill_2d(grid, [et](double, double y) { return et * std::sin(pi * y); });
}

Forcing flow_forcing(const Grid& grid, double nu) {
  std::vector<SpectralField> base;
  for (const auto& u : flow_exact_velocity(grid, 0.0)) base.push_back(forward(u));
  const SpectralField p0 = forward(flow_exact_pressure(grid, 0.0));
  return [grid, nu, base, p0](double t) {
    const double et = std::exp(t);
    std::vector<SpectralField> u;
    for (const auto& b : base) u.push_back(et * b);
    const auto adv = advection(u, false);
    const auto k2 = grid.k_squared();
    std::vector<SpectralField> out;
    for (int i = 0; i < 2; ++i) {
      SpectralField f = derivative(p0, i);
      f *= et;
      for (std::size_t s = 0; s < f.size(); ++s) f[s] += (1.0 + nu * k2[s]) * u[i][s] + adv[i][s];
      out.push_back(std::move(f));
    }
    return out;
  };
}

}  // namespace resav::harness
