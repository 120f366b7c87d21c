#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "resav/errors.hpp"
#include "resav/harness/driver.hpp"
#include "resav/harness/io.hpp"
#include "resav/savkernel.hpp"
#include "resav/spectral.hpp"

namespace py = pybind11;
using namespace resav;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> shape_of(const Grid& g) { return {g.extents().begin(), g.extents().end()}; }

std::vector<py::ssize_t> spectral_shape(const Grid& g) {
  auto s = shape_of(g);
  s.back() = s.back() / 2 + 1;
  return s;
}

Field to_field(const Grid& g, const RealArray& a) {
  if (static_cast<std::size_t>(a.size()) != g.size()) throw DimensionMismatch("array size does not match the grid");
  return Field(g, std::span<const double>(a.data(), g.size()));
}

RealArray to_array(const Field& f) {
  RealArray out(shape_of(f.grid()));
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

harness::RunConfig config_from(const std::string& text, const std::vector<std::string>& overrides) {
  harness::RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    harness::apply_override(cfg, line);
  }
  for (const auto& o : overrides) harness::apply_override(cfg, o);
  harness::validate(cfg);
  return cfg;
}

py::dict outcome(const RelaxOutcome& r) {
  py::dict d;
  d["theta0"] = r.theta0;
  d["gamma"] = r.gamma;
  d["case"] = r.case_id;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Relaxed exponential SAV schemes on periodic Fourier grids";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Grid>(m, "Grid")
      .def(py::init<std::vector<int>, std::vector<double>, std::vector<double>>(), py::arg("extents"),
           py::arg("lengths"), py::arg("origin") = std::vector<double>{})
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("extents", [](const Grid& g) { return std::vector<int>(g.extents().begin(), g.extents().end()); })
      .def_property_readonly("lengths", [](const Grid& g) { return std::vector<double>(g.lengths().begin(), g.lengths().end()); })
      .def_property_readonly("origin", [](const Grid& g) { return std::vector<double>(g.origin().begin(), g.origin().end()); })
      .def("coordinates", &Grid::coordinates)
      .def("wavenumbers", &Grid::wavenumbers)
      .def("__repr__", [](const Grid& g) {
        std::string s = "Grid(";
        for (int i = 0; i < g.dim(); ++i) s += (i ? "x" : "") + std::to_string(g.extents()[i]);
        return s + ")";
      });

  m.def("forward", [](const Grid& g, const RealArray& a) {
    const SpectralField f = forward(to_field(g, a));
    ComplexArray out(spectral_shape(g));
    std::copy(f.coeffs().begin(), f.coeffs().end(), out.mutable_data());
    return out;
  });
  m.def("backward", [](const Grid& g, const ComplexArray& a) {
    if (static_cast<std::size_t>(a.size()) != g.spectral_size()) throw DimensionMismatch("array size does not match the grid");
    SpectralField f(g);
    std::copy(a.data(), a.data() + a.size(), f.coeffs().begin());
    return to_array(backward(f));
  });
  m.def("leray_project", [](const Grid& g, const std::vector<RealArray>& u) {
    std::vector<SpectralField> hats;
    for (const auto& c : u) hats.push_back(forward(to_field(g, c)));
    std::vector<RealArray> out;
    for (const auto& c : leray_project(hats)) out.push_back(to_array(backward(c)));
    return out;
  });

  m.def("bdf_tableau", [](int k) {
    const BdfTableau t = bdf_tableau(k);
    py::dict d;
    d["alpha"] = t.alpha;
    d["a"] = t.a;
    d["b"] = t.b;
    d["p"] = t.p;
    return d;
  });
  m.def("v_poly", &v_poly, py::arg("k"), py::arg("xi"));
  m.def("relax_esav1", [](double lrt, double e1, double diss, double dt, double gamma, double of) {
    return outcome(relax_esav1(lrt, e1, diss, dt, gamma, of));
  }, py::arg("log_r_tilde"), py::arg("e1_new"), py::arg("dissipation"), py::arg("dt"), py::arg("gamma"),
     py::arg("order_factor") = 1.0);
  m.def("relax_esav2", [](double lrt, double e, double kn, double kx, double dt) {
    return outcome(relax_esav2(lrt, e, kn, kx, dt));
  }, py::arg("log_r_tilde"), py::arg("e_new"), py::arg("k_new"), py::arg("k_extrap"), py::arg("dt"));
  m.def("relax_mesav", [](double a1, double a2, double c) { return outcome(relax_mesav(a1, a2, c)); },
        py::arg("a_hat1"), py::arg("a_hat2"), py::arg("c_hat"));

  m.def("csv_columns", &harness::csv_columns);

  m.def("run", [](const std::string& text, const std::vector<std::string>& overrides) {
    const harness::RunConfig cfg = config_from(text, overrides);
    harness::RunResult r;
    {
      py::gil_scoped_release nogil;
      r = harness::run_simulation(cfg);
    }
    const auto& cols = harness::csv_columns();
    RealArray rows({static_cast<py::ssize_t>(r.rows.size()), static_cast<py::ssize_t>(cols.size())});
    double* p = rows.mutable_data();
    for (const auto& row : r.rows) {
      *p++ = static_cast<double>(row.step);
      *p++ = row.t;
      for (double v : harness::csv_values(row)) *p++ = v;
    }
    py::list fields;
    for (const Field& f : r.final_fields) fields.append(to_array(f));
    py::dict out;
    out["columns"] = cols;
    out["rows"] = rows;
    out["fields"] = fields;
    out["t"] = r.t;
    out["steps"] = r.steps;
    return out;
  }, py::arg("config"), py::arg("overrides") = std::vector<std::string>{});

  m.def("converge", [](const std::string& text, std::vector<double> dts, const std::string& reference,
                       const std::vector<std::string>& overrides) {
    const harness::RunConfig cfg = config_from(text, overrides);
    std::vector<harness::ConvergenceRow> rows;
    {
      py::gil_scoped_release nogil;
      rows = harness::converge(cfg, std::move(dts), reference, harness::thread_budget());
    }
    py::list out;
    for (const auto& r : rows)
      out.append(py::make_tuple(r.dt, r.error, r.rate ? py::cast(*r.rate) : py::none()));
    return out;
  }, py::arg("config"), py::arg("dts"), py::arg("reference") = "exact",
     py::arg("overrides") = std::vector<std::string>{});

  m.def("read_snapshot", [](const std::string& path) {
    const harness::Snapshot s = harness::read_snapshot(path);
    RealArray a(std::vector<py::ssize_t>(s.extents.begin(), s.extents.end()));
    std::copy(s.values.begin(), s.values.end(), a.mutable_data());
    return py::make_tuple(a, s.lengths, s.t);
  });
  m.def("write_snapshot", [](const RealArray& a, std::vector<double> lengths, double t, const std::string& path) {
    std::vector<int> ext(a.shape(), a.shape() + a.ndim());
    const Grid g(ext, std::move(lengths));
    harness::write_snapshot(to_field(g, a), t, path);
  }, py::arg("values"), py::arg("lengths"), py::arg("t"), py::arg("path"));
}
