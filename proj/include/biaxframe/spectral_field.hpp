#pragma once

// Periodic-grid fields and Fourier-space calculus on [0, L)^2.
//
// Real samples are stored row-major with the x index outermost:
// f(x_i, y_j) = data[i * n + j], x_i = i L / n. The half-complex spectrum
// follows FFTW's r2c layout, n x (n/2 + 1), with the y index halved.
//
// Derivative operators use wavenumbers whose Nyquist entry is zero, so the
// discrete gradient is exactly skew-adjoint under grid quadrature and the
// Laplacian is the composition of the two first derivatives.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace biaxframe {

using Complex = std::complex<double>;

class Grid2D {
 public:
  Grid2D(std::size_t n, double length);

  std::size_t n() const { return n_; }
  double length() const { return length_; }
  std::size_t points() const { return n_ * n_; }
  std::size_t spectral_points() const { return n_ * (n_ / 2 + 1); }
  double spacing() const { return length_ / static_cast<double>(n_); }
  double cell_area() const { return spacing() * spacing(); }
  /// 2 pi / L
  double fundamental() const;
  /// Largest resolved wavenumber, (n/2) 2 pi / L.
  double k_max() const { return 0.5 * static_cast<double>(n_) * fundamental(); }

  /// Signed integer mode numbers of spectral index (i, j).
  long mode_x(std::size_t i) const;
  long mode_y(std::size_t j) const { return static_cast<long>(j); }

  bool operator==(const Grid2D&) const = default;

 private:
  std::size_t n_;
  double length_;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid2D& g, double value = 0.0)
      : n_(g.n()), data_(g.points(), value) {}

  std::size_t n() const { return n_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t p) { return data_[p]; }
  double operator[](std::size_t p) const { return data_[p]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  /// this += s * o
  ScalarField& axpy(double s, const ScalarField& o);

  bool all_finite() const;
  double max_abs() const;

  bool operator==(const ScalarField&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

using Vec2Field = std::array<ScalarField, 2>;
using Vec3Field = std::array<ScalarField, 3>;
using Tensor33Field = std::array<std::array<ScalarField, 3>, 3>;

Vec2Field make_vec2(const Grid2D& g);
Vec3Field make_vec3(const Grid2D& g);
Tensor33Field make_tensor33(const Grid2D& g);

/// Throws Error(kDimension) if `f` does not live on `g`.
void require_shape(const ScalarField& f, const Grid2D& g, const char* what);

using Spectrum = std::vector<Complex>;

/// Thread cap for pointwise kernels: BIAXFRAME_THREADS if set, else hardware.
unsigned kernel_threads();

/// Runs body(begin, end) over [0, count) split into contiguous chunks.
/// Chunks write disjoint outputs, so results do not depend on the split.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

/// FFT plans and Fourier-multiplier calculus for one grid. Plans are created
/// once and shared read-only; every method is const and reentrant.
class Spectral {
 public:
  explicit Spectral(const Grid2D& g);

  const Grid2D& grid() const { return grid_; }

  Spectrum forward(const ScalarField& f) const;
  ScalarField inverse(const Spectrum& s) const;
  void forward(std::span<const double> in, std::span<Complex> out) const;
  /// Normalized inverse; `in` is left untouched.
  void inverse(std::span<const Complex> in, std::span<double> out) const;

  /// Derivative wavenumbers (Nyquist entry zero) for spectral index i / j.
  double kx(std::size_t i) const { return kx_[i]; }
  double ky(std::size_t j) const { return ky_[j]; }
  /// |k| with the true Nyquist magnitude, in 1/length.
  double k_abs(std::size_t i, std::size_t j) const;
  /// True for modes kept by the 2/3 rule, |k| <= (2/3) k_max.
  bool retained(std::size_t i, std::size_t j) const;

  ScalarField dx(const ScalarField& f) const;
  ScalarField dy(const ScalarField& f) const;
  Vec2Field grad(const ScalarField& f) const;
  ScalarField div(const Vec2Field& v) const;
  /// Curl of a 3-vector field that does not depend on z.
  Vec3Field curl3(const Vec3Field& v) const;
  ScalarField laplacian(const ScalarField& f) const;

  Vec2Field leray_project(const Vec2Field& v) const;
  ScalarField dealias(const ScalarField& f) const;
  Vec2Field dealias(const Vec2Field& v) const;

  /// In-place multiplier application on a spectrum.
  void apply(Spectrum& s, const std::function<Complex(std::size_t, std::size_t)>& m) const;
  void dealias_spectrum(Spectrum& s) const;
  void leray_spectrum(Spectrum& sx, Spectrum& sy) const;

  /// Uniform grid quadrature of f.
  double integrate(const ScalarField& f) const;
  /// Grid quadrature of f^2.
  double l2_squared(const ScalarField& f) const;
  /// Same quantity computed from Fourier coefficients (Parseval).
  double l2_squared_spectral(const Spectrum& s) const;

 private:
  struct Plans;

  Grid2D grid_;
  std::shared_ptr<const Plans> plans_;
  std::vector<double> kx_, ky_;
};

}  // namespace biaxframe
