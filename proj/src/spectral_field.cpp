#include "biaxframe/spectral_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "biaxframe/error.hpp"

namespace biaxframe {

// ---------------------------------------------------------------- Grid2D

Grid2D::Grid2D(std::size_t n, double length) : n_(n), length_(length) {
  if (n < 16 || (n & (n - 1)) != 0) {
    throw Error(ErrorKind::kConfiguration,
                "grid size must be a power of two >= 16, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error(ErrorKind::kConfiguration, "domain length must be positive");
  }
}

double Grid2D::fundamental() const { return 2.0 * std::numbers::pi / length_; }

long Grid2D::mode_x(std::size_t i) const {
  const long ii = static_cast<long>(i);
  const long nn = static_cast<long>(n_);
  return ii <= nn / 2 ? ii : ii - nn;
}

// ---------------------------------------------------------------- ScalarField

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  for (std::size_t p = 0; p < data_.size(); ++p) data_[p] += o.data_[p];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (std::size_t p = 0; p < data_.size(); ++p) data_[p] -= o.data_[p];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& o) {
  for (std::size_t p = 0; p < data_.size(); ++p) data_[p] += s * o.data_[p];
  return *this;
}

bool ScalarField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

Vec2Field make_vec2(const Grid2D& g) { return {ScalarField(g), ScalarField(g)}; }
Vec3Field make_vec3(const Grid2D& g) {
  return {ScalarField(g), ScalarField(g), ScalarField(g)};
}
Tensor33Field make_tensor33(const Grid2D& g) {
  return {make_vec3(g), make_vec3(g), make_vec3(g)};
}

void require_shape(const ScalarField& f, const Grid2D& g, const char* what) {
  if (f.n() != g.n() || f.size() != g.points()) {
    std::ostringstream os;
    os << what << ": field of size " << f.n() << " on grid of size " << g.n();
    throw Error(ErrorKind::kDimension, os.str());
  }
}

// ---------------------------------------------------------------- threading

unsigned kernel_threads() {
  static const unsigned threads = [] {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BIAXFRAME_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 1) return std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
  }();
  return threads;
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  const unsigned threads = kernel_threads();
  if (threads <= 1 || count < 4096) {
    body(0, count);
    return;
  }
  const std::size_t chunk = (count + threads - 1) / threads;
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(count, b + chunk);
    if (b < e) pool.emplace_back([&body, b, e] { body(b, e); });
  }
  body(0, std::min(count, chunk));
}

// ---------------------------------------------------------------- Spectral

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Spectral::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit Plans(std::size_t n) {
    const int nn = static_cast<int>(n);
    double* real = fftw_alloc_real(n * n);
    fftw_complex* cplx = fftw_alloc_complex(n * (n / 2 + 1));
    {
      std::lock_guard lock(planner_mutex());
      // ESTIMATE keeps the plan choice, and hence every bit of the output,
      // independent of timing measurements.
      r2c = fftw_plan_dft_r2c_2d(nn, nn, real, cplx, FFTW_ESTIMATE | FFTW_UNALIGNED);
      c2r = fftw_plan_dft_c2r_2d(nn, nn, cplx, real,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
    }
    fftw_free(real);
    fftw_free(cplx);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

Spectral::Spectral(const Grid2D& g)
    : grid_(g), plans_(std::make_shared<const Plans>(g.n())) {
  const std::size_t n = g.n();
  kx_.resize(n);
  ky_.resize(n / 2 + 1);
  const double k0 = g.fundamental();
  for (std::size_t i = 0; i < n; ++i) {
    kx_[i] = (i == n / 2) ? 0.0 : k0 * static_cast<double>(g.mode_x(i));
  }
  for (std::size_t j = 0; j <= n / 2; ++j) {
    ky_[j] = (j == n / 2) ? 0.0 : k0 * static_cast<double>(j);
  }
}

void Spectral::forward(std::span<const double> in, std::span<Complex> out) const {
  if (in.size() != grid_.points() || out.size() != grid_.spectral_points()) {
    throw Error(ErrorKind::kDimension, "forward transform: buffer size mismatch");
  }
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void Spectral::inverse(std::span<const Complex> in, std::span<double> out) const {
  if (in.size() != grid_.spectral_points() || out.size() != grid_.points()) {
    throw Error(ErrorKind::kDimension, "inverse transform: buffer size mismatch");
  }
  Spectrum scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(grid_.points());
  for (double& x : out) x *= scale;
}

Spectrum Spectral::forward(const ScalarField& f) const {
  require_shape(f, grid_, "forward transform");
  Spectrum s(grid_.spectral_points());
  forward(f.span(), s);
  return s;
}

ScalarField Spectral::inverse(const Spectrum& s) const {
  ScalarField f(grid_);
  inverse(s, f.span());
  return f;
}

double Spectral::k_abs(std::size_t i, std::size_t j) const {
  const double k0 = grid_.fundamental();
  const double mx = static_cast<double>(grid_.mode_x(i));
  const double my = static_cast<double>(grid_.mode_y(j));
  return k0 * std::hypot(mx, my);
}

bool Spectral::retained(std::size_t i, std::size_t j) const {
  const double mx = static_cast<double>(grid_.mode_x(i));
  const double my = static_cast<double>(grid_.mode_y(j));
  const double cut = static_cast<double>(grid_.n()) / 3.0;  // (2/3)(n/2)
  return mx * mx + my * my <= cut * cut;
}

void Spectral::apply(Spectrum& s,
                     const std::function<Complex(std::size_t, std::size_t)>& m) const {
  const std::size_t n = grid_.n();
  const std::size_t nh = n / 2 + 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < nh; ++j) s[i * nh + j] *= m(i, j);
  }
}

ScalarField Spectral::dx(const ScalarField& f) const {
  Spectrum s = forward(f);
  apply(s, [this](std::size_t i, std::size_t) { return Complex(0.0, kx_[i]); });
  return inverse(s);
}

ScalarField Spectral::dy(const ScalarField& f) const {
  Spectrum s = forward(f);
  apply(s, [this](std::size_t, std::size_t j) { return Complex(0.0, ky_[j]); });
  return inverse(s);
}

Vec2Field Spectral::grad(const ScalarField& f) const {
  const Spectrum s = forward(f);
  Spectrum sx = s, sy = s;
  apply(sx, [this](std::size_t i, std::size_t) { return Complex(0.0, kx_[i]); });
  apply(sy, [this](std::size_t, std::size_t j) { return Complex(0.0, ky_[j]); });
  return {inverse(sx), inverse(sy)};
}

ScalarField Spectral::div(const Vec2Field& v) const {
  Spectrum sx = forward(v[0]);
  const Spectrum sy = forward(v[1]);
  const std::size_t nh = grid_.n() / 2 + 1;
  for (std::size_t i = 0; i < grid_.n(); ++i) {
    for (std::size_t j = 0; j < nh; ++j) {
      const std::size_t q = i * nh + j;
      sx[q] = Complex(0.0, kx_[i]) * sx[q] + Complex(0.0, ky_[j]) * sy[q];
    }
  }
  return inverse(sx);
}

Vec3Field Spectral::curl3(const Vec3Field& v) const {
  // With d/dz = 0: curl v = (dy vz, -dx vz, dx vy - dy vx).
  const Spectrum sx = forward(v[0]);
  const Spectrum sy = forward(v[1]);
  const Spectrum sz = forward(v[2]);
  Spectrum c0(sz.size()), c1(sz.size()), c2(sz.size());
  const std::size_t nh = grid_.n() / 2 + 1;
  for (std::size_t i = 0; i < grid_.n(); ++i) {
    for (std::size_t j = 0; j < nh; ++j) {
      const std::size_t q = i * nh + j;
      const Complex ikx(0.0, kx_[i]), iky(0.0, ky_[j]);
      c0[q] = iky * sz[q];
      c1[q] = -ikx * sz[q];
      c2[q] = ikx * sy[q] - iky * sx[q];
    }
  }
  return {inverse(c0), inverse(c1), inverse(c2)};
}

ScalarField Spectral::laplacian(const ScalarField& f) const {
  Spectrum s = forward(f);
  apply(s, [this](std::size_t i, std::size_t j) {
    return Complex(-(kx_[i] * kx_[i] + ky_[j] * ky_[j]), 0.0);
  });
  return inverse(s);
}

void Spectral::leray_spectrum(Spectrum& sx, Spectrum& sy) const {
  const std::size_t nh = grid_.n() / 2 + 1;
  for (std::size_t i = 0; i < grid_.n(); ++i) {
    for (std::size_t j = 0; j < nh; ++j) {
      const double k2 = kx_[i] * kx_[i] + ky_[j] * ky_[j];
      if (k2 == 0.0) continue;
      const std::size_t q = i * nh + j;
      const Complex kdotv = kx_[i] * sx[q] + ky_[j] * sy[q];
      sx[q] -= kx_[i] * kdotv / k2;
      sy[q] -= ky_[j] * kdotv / k2;
    }
  }
}

Vec2Field Spectral::leray_project(const Vec2Field& v) const {
  Spectrum sx = forward(v[0]);
  Spectrum sy = forward(v[1]);
  leray_spectrum(sx, sy);
  return {inverse(sx), inverse(sy)};
}

void Spectral::dealias_spectrum(Spectrum& s) const {
  const std::size_t nh = grid_.n() / 2 + 1;
  for (std::size_t i = 0; i < grid_.n(); ++i) {
    for (std::size_t j = 0; j < nh; ++j) {
      if (!retained(i, j)) s[i * nh + j] = 0.0;
    }
  }
}

ScalarField Spectral::dealias(const ScalarField& f) const {
  Spectrum s = forward(f);
  dealias_spectrum(s);
  return inverse(s);
}

Vec2Field Spectral::dealias(const Vec2Field& v) const {
  return {dealias(v[0]), dealias(v[1])};
}

double Spectral::integrate(const ScalarField& f) const {
  require_shape(f, grid_, "integrate");
  double sum = 0.0;
  for (std::size_t p = 0; p < f.size(); ++p) sum += f[p];
  return sum * grid_.cell_area();
}

double Spectral::l2_squared(const ScalarField& f) const {
  require_shape(f, grid_, "l2 norm");
  double sum = 0.0;
  for (std::size_t p = 0; p < f.size(); ++p) sum += f[p] * f[p];
  return sum * grid_.cell_area();
}

double Spectral::l2_squared_spectral(const Spectrum& s) const {
  const std::size_t n = grid_.n();
  const std::size_t nh = n / 2 + 1;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < nh; ++j) {
      // Columns 0 and n/2 are their own conjugate partners.
      const double w = (j == 0 || j == n / 2) ? 1.0 : 2.0;
      sum += w * std::norm(s[i * nh + j]);
    }
  }
  const double np = static_cast<double>(grid_.points());
  return sum * grid_.cell_area() / np;
}

}  // namespace biaxframe
