#include "biaxframe/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "biaxframe/error.hpp"

namespace biaxframe {

ScalarField random_smooth_field(const Grid2D& g, int modes, std::uint64_t seed) {
  if (modes < 1) throw Error(ErrorKind::kConfiguration, "random field needs modes >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const std::size_t n = g.n();
  const double k0 = g.fundamental();
  const double h = g.spacing();
  ScalarField f(g);
  // Half-plane of wavevectors: my > 0, or my == 0 and mx > 0.
  for (int mx = -modes; mx <= modes; ++mx) {
    for (int my = 0; my <= modes; ++my) {
      if (my == 0 && mx <= 0) continue;
      const int m2 = mx * mx + my * my;
      if (m2 > modes * modes) continue;
      const double damp = 1.0 / (1.0 + m2);
      const double a = damp * coeff(rng);
      const double b = damp * coeff(rng);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double ph = k0 * h * (mx * static_cast<double>(i) + my * static_cast<double>(j));
          f(i, j) += a * std::cos(ph) + b * std::sin(ph);
        }
      }
    }
  }
  const double m = f.max_abs();
  if (m > 0.0) f *= 1.0 / m;
  return f;
}

FrameField random_rotation_frame(const Grid2D& g, const Frame& base, double amplitude, int modes,
                                 std::uint64_t seed) {
  require_valid(base);
  FrameField out(g);
  std::array<ScalarField, 3> w;
  for (int c = 0; c < 3; ++c) w[c] = random_smooth_field(g, modes, seed * 3 + c + 1);
  // Each component has max 1, so |omega| <= sqrt(3) before this rescale.
  const double scale = amplitude / std::sqrt(3.0);
  for (std::size_t p = 0; p < g.points(); ++p) {
    out.set(p, rotated(base, scale * Vec3(w[0][p], w[1][p], w[2][p])));
  }
  return out;
}

VelocityField taylor_green(const Grid2D& g, double amplitude, int mode) {
  const double k = mode * g.fundamental();
  const double h = g.spacing();
  VelocityField v = make_vec2(g);
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = 0; j < g.n(); ++j) {
      const double x = h * static_cast<double>(i), y = h * static_cast<double>(j);
      v[0](i, j) = amplitude * std::sin(k * x) * std::cos(k * y);
      v[1](i, j) = -amplitude * std::cos(k * x) * std::sin(k * y);
    }
  }
  return v;
}

VelocityField random_divfree_velocity(const Spectral& sp, double amplitude, int modes,
                                      std::uint64_t seed) {
  const ScalarField psi = random_smooth_field(sp.grid(), modes, seed);
  VelocityField v = {sp.dy(psi), sp.dx(psi)};
  v[1] *= -1.0;
  v = sp.dealias(v);
  const double m = std::max(v[0].max_abs(), v[1].max_abs());
  if (m > 0.0) {
    v[0] *= amplitude / m;
    v[1] *= amplitude / m;
  }
  return v;
}

void perturb(const Spectral& sp, FrameField& f, VelocityField& v, double eps, int modes,
             std::uint64_t seed) {
  if (eps == 0.0) return;
  const Grid2D& g = sp.grid();
  require_shape(f, g, "perturb");
  std::array<ScalarField, 3> w;
  for (int c = 0; c < 3; ++c) w[c] = random_smooth_field(g, modes, seed * 7 + c + 11);
  for (std::size_t p = 0; p < g.points(); ++p) {
    const Mat3 r = rotation_matrix(eps * Vec3(w[0][p], w[1][p], w[2][p]));
    Frame fr = f.at(p);
    for (int a = 0; a < 3; ++a) fr[a] = r * fr[a];
    f.set(p, fr);
  }
  const VelocityField dv = random_divfree_velocity(sp, 1.0, modes, seed * 7 + 5);
  v[0].axpy(eps, dv[0]);
  v[1].axpy(eps, dv[1]);
}

}  // namespace biaxframe
