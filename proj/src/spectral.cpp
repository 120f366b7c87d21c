#include "resav/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace resav {

namespace {

// FFTW's planner is not re-entrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw DimensionMismatch(std::string(what) + ": grid mismatch");
}

}  // namespace

struct Grid::Impl {
  std::vector<int> extents;
  std::vector<double> lengths;
  std::vector<double> origin;
  std::size_t size = 1;
  std::size_t spectral_size = 1;
  std::vector<double> k2;
  std::array<std::vector<double>, 3> kd;
  std::vector<double> weight;
  std::vector<double> mask;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (r2c != nullptr) fftw_destroy_plan(r2c);
    if (c2r != nullptr) fftw_destroy_plan(c2r);
  }
};

Grid::Grid(std::vector<int> extents, std::vector<double> lengths,
           std::vector<double> origin) {
  const int d = static_cast<int>(extents.size());
  if (d < 1 || d > 3) throw DimensionMismatch("grid dimension must be 1, 2 or 3");
  if (lengths.size() != extents.size())
    throw DimensionMismatch("grid: one box length per axis required");
  if (origin.empty()) origin.assign(extents.size(), 0.0);
  if (origin.size() != extents.size())
    throw DimensionMismatch("grid: one origin coordinate per axis required");
  for (int a = 0; a < d; ++a) {
    if (extents[a] < 4 || extents[a] % 2 != 0)
      throw DimensionMismatch("grid: extents must be even and >= 4");
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
      throw DimensionMismatch("grid: box lengths must be positive");
  }

  auto impl = std::make_shared<Impl>();
  impl->extents = std::move(extents);
  impl->lengths = std::move(lengths);
  impl->origin = std::move(origin);
  for (int a = 0; a < d; ++a) impl->size *= static_cast<std::size_t>(impl->extents[a]);
  const int n_last = impl->extents[d - 1];
  const int half = n_last / 2 + 1;
  impl->spectral_size = impl->size / n_last * half;

  const std::size_t ns = impl->spectral_size;
  impl->k2.assign(ns, 0.0);
  impl->weight.assign(ns, 1.0);
  impl->mask.assign(ns, 1.0);
  for (int a = 0; a < d; ++a) impl->kd[a].assign(ns, 0.0);

  std::array<int, 3> idx{0, 0, 0};
  for (std::size_t s = 0; s < ns; ++s) {
    // decompose s into (i_0, .., i_{d-2}, j)
    std::size_t rem = s;
    idx[d - 1] = static_cast<int>(rem % half);
    rem /= half;
    for (int a = d - 2; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % impl->extents[a]);
      rem /= impl->extents[a];
    }
    double k2 = 0.0;
    bool keep = true;
    for (int a = 0; a < d; ++a) {
      const int n = impl->extents[a];
      const int m = (idx[a] < n / 2) ? idx[a] : idx[a] - n;
      const double k = 2.0 * std::numbers::pi * m / impl->lengths[a];
      k2 += k * k;
      impl->kd[a][s] = (idx[a] == n / 2) ? 0.0 : k;
      if (3 * std::abs(m) >= n) keep = false;
    }
    impl->k2[s] = k2;
    impl->mask[s] = keep ? 1.0 : 0.0;
    const int j = idx[d - 1];
    impl->weight[s] = (j > 0 && j < n_last / 2) ? 2.0 : 1.0;
  }

  {
    std::lock_guard lock(planner_mutex());
    double* rin = fftw_alloc_real(impl->size);
    fftw_complex* cout = fftw_alloc_complex(impl->spectral_size);
    impl->r2c = fftw_plan_dft_r2c(d, impl->extents.data(), rin, cout, FFTW_ESTIMATE);
    impl->c2r = fftw_plan_dft_c2r(d, impl->extents.data(), cout, rin, FFTW_ESTIMATE);
    fftw_free(rin);
    fftw_free(cout);
  }
  if (impl->r2c == nullptr || impl->c2r == nullptr)
    throw NumericalError("grid: FFTW planning failed");
  impl_ = std::move(impl);
}

int Grid::dim() const noexcept { return static_cast<int>(impl_->extents.size()); }
std::span<const int> Grid::extents() const noexcept { return impl_->extents; }
std::span<const double> Grid::lengths() const noexcept { return impl_->lengths; }
std::span<const double> Grid::origin() const noexcept { return impl_->origin; }
std::size_t Grid::size() const noexcept { return impl_->size; }
std::size_t Grid::spectral_size() const noexcept { return impl_->spectral_size; }

double Grid::spacing(int axis) const {
  if (axis < 0 || axis >= dim()) throw DimensionMismatch("grid: axis out of range");
  return impl_->lengths[axis] / impl_->extents[axis];
}

double Grid::cell_volume() const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= impl_->lengths[a] / impl_->extents[a];
  return v;
}

double Grid::measure() const noexcept {
  double v = 1.0;
  for (double l : impl_->lengths) v *= l;
  return v;
}

std::vector<double> Grid::wavenumbers(int axis) const {
  const int n = impl_->extents.at(axis);
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) {
    const int m = (i < n / 2) ? i : i - n;
    k[i] = 2.0 * std::numbers::pi * m / impl_->lengths[axis];
  }
  return k;
}

std::vector<double> Grid::coordinates(int axis) const {
  const int n = impl_->extents.at(axis);
  const double h = spacing(axis);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = impl_->origin[axis] + i * h;
  return x;
}

std::span<const double> Grid::k_squared() const noexcept { return impl_->k2; }

std::span<const double> Grid::k_derivative(int axis) const {
  if (axis < 0 || axis >= dim()) throw DimensionMismatch("grid: axis out of range");
  return impl_->kd[axis];
}

std::span<const double> Grid::mode_weight() const noexcept { return impl_->weight; }
std::span<const double> Grid::dealias_mask() const noexcept { return impl_->mask; }

bool Grid::operator==(const Grid& other) const noexcept {
  if (impl_ == other.impl_) return true;
  return impl_->extents == other.impl_->extents && impl_->lengths == other.impl_->lengths &&
         impl_->origin == other.impl_->origin;
}

void Grid::execute_forward(const double* in, Complex* out) const {
  fftw_execute_dft_r2c(impl_->r2c, const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void Grid::execute_backward(Complex* scratch_in, double* out) const {
  fftw_execute_dft_c2r(impl_->c2r, reinterpret_cast<fftw_complex*>(scratch_in), out);
}

// ---------------------------------------------------------------- Field

Field::Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

Field::Field(Grid grid, RealBuffer values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DimensionMismatch("field: value count != grid size");
}

Field::Field(Grid grid, std::span<const double> values)
    : grid_(std::move(grid)), values_(values.begin(), values.end()) {
  if (values_.size() != grid_.size()) throw DimensionMismatch("field: value count != grid size");
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(grid_, other.grid_, "field +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(grid_, other.grid_, "field -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::axpy(double a, const Field& x) {
  require_same_grid(grid_, x.grid_, "field axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::mean() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

// -------------------------------------------------------- SpectralField

SpectralField::SpectralField(Grid grid)
    : grid_(std::move(grid)), coeffs_(grid_.spectral_size(), Complex{}) {}

SpectralField::SpectralField(Grid grid, ComplexBuffer coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.spectral_size())
    throw DimensionMismatch("spectral field: coefficient count != grid spectral size");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "spectral +=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "spectral -=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) noexcept {
  for (Complex& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& x) {
  require_same_grid(grid_, x.grid_, "spectral axpy");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

// ----------------------------------------------------------- transforms

SpectralField forward(const Field& f) {
  const Grid& g = f.grid();
  if (f.size() != g.size()) throw DimensionMismatch("forward: field size != grid size");
  SpectralField out(g);
  g.execute_forward(f.data(), out.data());
  return out;
}

Field backward(const SpectralField& f) {
  const Grid& g = f.grid();
  if (f.size() != g.spectral_size())
    throw DimensionMismatch("backward: coefficient count != grid spectral size");
  ComplexBuffer scratch(f.coeffs().begin(), f.coeffs().end());
  Field out(g);
  g.execute_backward(scratch.data(), out.data());
  out *= 1.0 / static_cast<double>(g.size());
  return out;
}

// ------------------------------------------------------------ operators

SpectralField apply_symbol(SpectralField f, std::span<const double> symbol) {
  if (symbol.size() != f.size()) throw DimensionMismatch("apply_symbol: symbol size mismatch");
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= symbol[i];
  return f;
}

SpectralField solve_diagonal(SpectralField rhs, std::span<const double> symbol,
                             ZeroMode zero_mode) {
  if (symbol.size() != rhs.size()) throw DimensionMismatch("solve_diagonal: symbol size mismatch");
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    const double s = symbol[i];
    if (s != 0.0) {
      rhs[i] /= s;
    } else if (i == 0 && zero_mode == ZeroMode::mean_free) {
      rhs[i] = 0.0;
    } else if (rhs[i] != Complex{}) {
      throw SingularSolve("solve_diagonal: zero symbol at mode " + std::to_string(i) +
                          " with nonzero right-hand side");
    }
  }
  return rhs;
}

double inner_product(const Field& f, const Field& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  double s = 0.0;
  const double* a = f.data();
  const double* b = g.data();
  for (std::size_t i = 0; i < f.size(); ++i) s += a[i] * b[i];
  return s * f.grid().cell_volume();
}

double spectral_inner(const SpectralField& f, const SpectralField& g,
                      std::span<const double> symbol) {
  require_same_grid(f.grid(), g.grid(), "spectral_inner");
  const Grid& grid = f.grid();
  const auto w = grid.mode_weight();
  double s = 0.0;
  if (symbol.empty()) {
    for (std::size_t i = 0; i < f.size(); ++i)
      s += w[i] * (f[i].real() * g[i].real() + f[i].imag() * g[i].imag());
  } else {
    if (symbol.size() != f.size()) throw DimensionMismatch("spectral_inner: symbol size mismatch");
    for (std::size_t i = 0; i < f.size(); ++i)
      s += w[i] * symbol[i] * (f[i].real() * g[i].real() + f[i].imag() * g[i].imag());
  }
  const double n = static_cast<double>(grid.size());
  return s * grid.measure() / (n * n);
}

double l2_norm(const Field& f) { return std::sqrt(inner_product(f, f)); }

Symbol laplacian_symbol(const Grid& grid) {
  const auto k2 = grid.k_squared();
  Symbol s(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) s[i] = -k2[i];
  return s;
}

SpectralField derivative(const SpectralField& f, int axis) {
  const auto k = f.grid().k_derivative(axis);
  SpectralField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = Complex(0.0, k[i]) * f[i];
  return out;
}

Field derivative(const Field& f, int axis) { return backward(derivative(forward(f), axis)); }

double grad_norm_sq(const SpectralField& f) {
  const Grid& grid = f.grid();
  const auto w = grid.mode_weight();
  double s = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const auto k = grid.k_derivative(a);
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * k[i] * k[i] * std::norm(f[i]);
  }
  const double n = static_cast<double>(grid.size());
  return s * grid.measure() / (n * n);
}

double grad_norm_sq(const Field& f) { return grad_norm_sq(forward(f)); }

std::vector<SpectralField> leray_project(std::vector<SpectralField> u) {
  if (u.empty()) return u;
  const Grid grid = u.front().grid();
  const int d = grid.dim();
  if (static_cast<int>(u.size()) != d)
    throw DimensionMismatch("leray_project: one velocity component per axis required");
  for (const auto& c : u) require_same_grid(grid, c.grid(), "leray_project");
  std::array<std::span<const double>, 3> k;
  for (int a = 0; a < d; ++a) k[a] = grid.k_derivative(a);
  for (std::size_t i = 0; i < grid.spectral_size(); ++i) {
    double kk = 0.0;
    Complex kdotu{};
    for (int a = 0; a < d; ++a) {
      kk += k[a][i] * k[a][i];
      kdotu += k[a][i] * u[a][i];
    }
    if (kk == 0.0) continue;
    const Complex s = kdotu / kk;
    for (int a = 0; a < d; ++a) u[a][i] -= k[a][i] * s;
  }
  return u;
}

double relative_divergence(std::span<const SpectralField> u) {
  if (u.empty()) return 0.0;
  const Grid& grid = u.front().grid();
  const int d = static_cast<int>(u.size());
  const auto w = grid.mode_weight();
  double div = 0.0;
  double grad = 0.0;
  for (std::size_t i = 0; i < grid.spectral_size(); ++i) {
    Complex kdotu{};
    double kk = 0.0;
    double uu = 0.0;
    for (int a = 0; a < d; ++a) {
      const double ka = grid.k_derivative(a)[i];
      kdotu += ka * u[a][i];
      kk += ka * ka;
      uu += std::norm(u[a][i]);
    }
    div += w[i] * std::norm(kdotu);
    grad += w[i] * kk * uu;
  }
  if (grad == 0.0) return 0.0;
  return std::sqrt(div / grad);
}

void dealias(SpectralField& f) {
  const auto m = f.grid().dealias_mask();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= m[i];
}

}  // namespace resav
