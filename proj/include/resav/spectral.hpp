#pragma once

// Periodic uniform grids, real/spectral fields and the diagonal Fourier
// operators used by every integrator.

#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <vector>

#include <fftw3.h>

#include "resav/errors.hpp"

namespace resav {

/// std allocator backed by fftw_malloc so every buffer carries FFTW's SIMD
/// alignment and can be passed to the new-array execute functions.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() noexcept = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept {
    return true;
  }
};

using Complex = std::complex<double>;
using RealBuffer = std::vector<double, FftwAllocator<double>>;
using ComplexBuffer = std::vector<Complex, FftwAllocator<Complex>>;

/// Periodic box [origin, origin + L) in 1-3 dimensions with N_i nodes per
/// axis. Immutable; copies share the transform plans and mode tables.
///
/// Spectral storage follows FFTW's real-to-complex layout: all axes full,
/// the last axis truncated to N/2 + 1 modes.
class Grid {
 public:
  Grid(std::vector<int> extents, std::vector<double> lengths,
       std::vector<double> origin = {});

  int dim() const noexcept;
  std::span<const int> extents() const noexcept;
  std::span<const double> lengths() const noexcept;
  std::span<const double> origin() const noexcept;

  std::size_t size() const noexcept;           ///< real nodes
  std::size_t spectral_size() const noexcept;  ///< stored complex modes
  double spacing(int axis) const;
  double cell_volume() const noexcept;
  double measure() const noexcept;  ///< |Omega|

  /// k = 2 pi m / L in FFT ordering (0, 1, .., N/2-1, -N/2, .., -1).
  std::vector<double> wavenumbers(int axis) const;
  /// Node coordinates origin + j h along one axis.
  std::vector<double> coordinates(int axis) const;

  /// Per stored mode: |k|^2 (Nyquist included).
  std::span<const double> k_squared() const noexcept;
  /// Per stored mode: k along an axis for first derivatives (Nyquist zeroed
  /// so odd operators keep real fields real).
  std::span<const double> k_derivative(int axis) const;
  /// Per stored mode: multiplicity of the mode in the full spectrum (1 or 2).
  std::span<const double> mode_weight() const noexcept;
  /// Per stored mode: 1 inside the 2/3-rule band, 0 outside.
  std::span<const double> dealias_mask() const noexcept;

  bool operator==(const Grid& other) const noexcept;
  bool operator!=(const Grid& other) const noexcept { return !(*this == other); }

  // Transform execution; buffers must be fftw_malloc aligned (see
  // FftwAllocator). backward() leaves the output unnormalized.
  void execute_forward(const double* in, Complex* out) const;
  void execute_backward(Complex* scratch_in, double* out) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Real grid function, row-major (last axis fastest).
class Field {
 public:
  explicit Field(Grid grid);
  Field(Grid grid, RealBuffer values);
  Field(Grid grid, std::span<const double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s) noexcept;
  /// this += a * x
  Field& axpy(double a, const Field& x);

  bool all_finite() const noexcept;
  double max_abs() const noexcept;
  double mean() const noexcept;

 private:
  Grid grid_;
  RealBuffer values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Fourier coefficients of a real field (unnormalized forward transform).
class SpectralField {
 public:
  explicit SpectralField(Grid grid);
  SpectralField(Grid grid, ComplexBuffer coeffs);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex& operator[](std::size_t i) noexcept { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return coeffs_[i]; }
  Complex* data() noexcept { return coeffs_.data(); }
  const Complex* data() const noexcept { return coeffs_.data(); }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s) noexcept;
  SpectralField& axpy(double a, const SpectralField& x);

 private:
  Grid grid_;
  ComplexBuffer coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

enum class Direction { forward, backward };

SpectralField forward(const Field& f);
Field backward(const SpectralField& f);

/// Per-mode real multiplier, laid out like SpectralField::coeffs().
using Symbol = std::vector<double>;

SpectralField apply_symbol(SpectralField f, std::span<const double> symbol);

/// How solve_diagonal treats a zero symbol at the mean mode.
enum class ZeroMode {
  strict,     ///< zero symbol with nonzero rhs is a SingularSolve
  mean_free,  ///< the mean mode of the solution is set to zero
};

/// Solves symbol * x = rhs mode by mode.
SpectralField solve_diagonal(SpectralField rhs, std::span<const double> symbol,
                             ZeroMode zero_mode = ZeroMode::strict);

/// Collocation quadrature h_1..h_d sum f g.
double inner_product(const Field& f, const Field& g);
/// Same quadrature evaluated from Fourier coefficients (Parseval), with an
/// optional real multiplier: (S f, g).
double spectral_inner(const SpectralField& f, const SpectralField& g,
                      std::span<const double> symbol = {});
double l2_norm(const Field& f);

Symbol laplacian_symbol(const Grid& grid);
/// d/dx_axis in spectral space.
SpectralField derivative(const SpectralField& f, int axis);
Field derivative(const Field& f, int axis);

/// sum_i (d_i f, d_i f)
double grad_norm_sq(const Field& f);
double grad_norm_sq(const SpectralField& f);

/// Orthogonal projection onto divergence-free fields (mode 0 untouched).
std::vector<SpectralField> leray_project(std::vector<SpectralField> u);
/// ||div u|| / ||grad u|| in the L2 sense, 0 for a constant field.
double relative_divergence(std::span<const SpectralField> u);

void dealias(SpectralField& f);

}  // namespace resav
