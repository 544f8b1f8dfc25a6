#include "biaxframe/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "biaxframe/error.hpp"

namespace biaxframe {

namespace {

constexpr double kInner = 0.75;        // annulus inner radius
constexpr double kOuter = 8.0 / 3.0;   // annulus outer radius
constexpr double kBall = 4.0 / 3.0;    // low-pass radius

double bump(double xi) {
  if (!(xi > kInner && xi < kOuter)) return 0.0;
  const double c = 0.5 * (kInner + kOuter);
  const double w = 0.5 * (kOuter - kInner);
  const double r = (xi - c) / w;
  return std::exp(-1.0 / (1.0 - r * r));
}

int top_block(const Grid2D& g) {
  // log2(n / 2) - 1; n is a power of two.
  int l = 0;
  for (std::size_t m = g.n() / 2; m > 1; m >>= 1) ++l;
  return l - 1;
}

double column_weight(std::size_t j, std::size_t n) { return (j == 0 || j == n / 2) ? 1.0 : 2.0; }

/// sum over the spectrum of column weight * mult * |s|^2, scaled to L^2.
template <class Mult>
double weighted_energy(const Spectral& sp, const Spectrum& s, Mult&& mult) {
  const Grid2D& g = sp.grid();
  const std::size_t n = g.n();
  const std::size_t nh = n / 2 + 1;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < nh; ++j) {
      const std::size_t q = i * nh + j;
      sum += column_weight(j, n) * mult(q, i, j) * std::norm(s[q]);
    }
  }
  const double nn = static_cast<double>(g.points());
  return sum * g.cell_area() / nn;
}

void require_block(const DyadicPartition& part, int j) {
  if (!part.in_range(j)) {
    throw Error(ErrorKind::kIndex, "block index " + std::to_string(j) + " outside [-1, " +
                                       std::to_string(part.j_max()) + "]");
  }
}

Spectrum block_spectrum(const Spectral& sp, const DyadicPartition& part, const ScalarField& f,
                        int j) {
  Spectrum s = sp.forward(f);
  const auto w = part.weights(j);
  for (std::size_t q = 0; q < s.size(); ++q) s[q] *= w[q];
  return s;
}

}  // namespace

// ---------------------------------------------------------------- partition

double DyadicPartition::phi(double xi) {
  const double b = bump(xi);
  if (b == 0.0) return 0.0;
  double norm = 0.0;
  for (int m = -2; m <= 2; ++m) norm += bump(std::ldexp(xi, -m));
  return b / norm;
}

double DyadicPartition::chi(double xi) {
  xi = std::abs(xi);
  if (xi >= kBall) return 0.0;
  double sum = 0.0;
  for (int j = 0; std::ldexp(xi, -j) > kInner; ++j) sum += phi(std::ldexp(xi, -j));
  return 1.0 - sum;
}

double DyadicPartition::weight(int j, double xi) {
  return j < 0 ? chi(xi) : phi(std::ldexp(std::abs(xi), -j));
}

DyadicPartition::DyadicPartition(const Grid2D& g) : grid_(g), j_max_(top_block(g)) {
  if (j_max_ < 1) {
    throw Error(ErrorKind::kConfiguration, "grid too small for a dyadic decomposition (n = " +
                                               std::to_string(g.n()) + ")");
  }
  const std::size_t n = g.n();
  const std::size_t nh = n / 2 + 1;
  radius_.resize(g.spectral_points());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < nh; ++j) {
      radius_[i * nh + j] = std::hypot(static_cast<double>(g.mode_x(i)),
                                       static_cast<double>(g.mode_y(j)));
    }
  }
  weights_.resize(static_cast<std::size_t>(j_max_ + 2));
  for (int j = -1; j <= j_max_; ++j) {
    auto& w = weights_[static_cast<std::size_t>(j + 1)];
    w.resize(radius_.size());
    for (std::size_t q = 0; q < radius_.size(); ++q) w[q] = weight(j, radius_[q]);
  }
}

std::span<const double> DyadicPartition::weights(int j) const {
  require_block(*this, j);
  return weights_[static_cast<std::size_t>(j + 1)];
}

DyadicPartition build_partition(const Grid2D& g) { return DyadicPartition(g); }

// ---------------------------------------------------------------- blocks

ScalarField delta_j(const Spectral& sp, const DyadicPartition& part, const ScalarField& f, int j) {
  require_shape(f, sp.grid(), "delta_j");
  require_block(part, j);
  return sp.inverse(block_spectrum(sp, part, f, j));
}

ScalarField s_j(const Spectral& sp, const DyadicPartition& part, const ScalarField& f, int j) {
  require_shape(f, sp.grid(), "s_j");
  if (j < -1 || j > part.j_max() + 1) {
    throw Error(ErrorKind::kIndex, "S_j index " + std::to_string(j) + " outside [-1, " +
                                       std::to_string(part.j_max() + 1) + "]");
  }
  Spectrum s = sp.forward(f);
  for (std::size_t q = 0; q < s.size(); ++q) {
    double w = 0.0;
    for (int k = -1; k <= j - 1; ++k) w += part.weights(k)[q];
    s[q] *= w;
  }
  return sp.inverse(s);
}

std::vector<double> block_energies(const Spectral& sp, const DyadicPartition& part,
                                   std::span<const ScalarField* const> components) {
  std::vector<double> e(static_cast<std::size_t>(part.j_max() + 2), 0.0);
  for (const ScalarField* c : components) {
    require_shape(*c, sp.grid(), "block_energies");
    const Spectrum s = sp.forward(*c);
    for (int j = -1; j <= part.j_max(); ++j) {
      const auto w = part.weights(j);
      e[static_cast<std::size_t>(j + 1)] +=
          weighted_energy(sp, s, [&](std::size_t q, std::size_t, std::size_t) {
            return w[q] * w[q];
          });
    }
  }
  return e;
}

std::vector<double> block_energies(const Spectral& sp, const DyadicPartition& part,
                                   const ScalarField& f) {
  const ScalarField* one[] = {&f};
  return block_energies(sp, part, one);
}

double besov_norm(const Spectral& sp, const DyadicPartition& part, const ScalarField& f, double s,
                  double q) {
  const bool sup = std::isinf(q) && q > 0;
  if (!sup && q != 2.0) {
    throw Error(ErrorKind::kConfiguration, "Besov index q must be 2 or infinity");
  }
  if (!std::isfinite(s)) throw Error(ErrorKind::kConfiguration, "Besov index s must be finite");
  const auto e = block_energies(sp, part, f);
  double acc = 0.0;
  for (int j = -1; j <= part.j_max(); ++j) {
    const double term = std::exp2(2.0 * s * j) * e[static_cast<std::size_t>(j + 1)];
    acc = sup ? std::max(acc, term) : acc + term;
  }
  return std::sqrt(acc);
}

double sobolev_norm(const Spectral& sp, const ScalarField& f, double s) {
  require_shape(f, sp.grid(), "sobolev_norm");
  const Spectrum spec = sp.forward(f);
  const Grid2D& g = sp.grid();
  return std::sqrt(weighted_energy(sp, spec, [&](std::size_t, std::size_t i, std::size_t j) {
    const double mx = static_cast<double>(g.mode_x(i));
    const double my = static_cast<double>(g.mode_y(j));
    return std::pow(1.0 + mx * mx + my * my, s);
  }));
}

double bernstein_ratio(const Spectral& sp, const DyadicPartition& part, const ScalarField& f,
                       int j) {
  require_shape(f, sp.grid(), "bernstein_ratio");
  require_block(part, j);
  const Spectrum s = sp.forward(f);
  const auto w = part.weights(j);
  const auto r = part.radius();
  const double e0 = weighted_energy(sp, s, [&](std::size_t q, std::size_t, std::size_t) {
    return w[q] * w[q];
  });
  const double e1 = weighted_energy(sp, s, [&](std::size_t q, std::size_t, std::size_t) {
    return w[q] * w[q] * r[q] * r[q];
  });
  const double total = weighted_energy(sp, s, [](std::size_t, std::size_t, std::size_t) {
    return 1.0;
  });
  if (!(e0 > 1e-24 * total)) {
    throw Error(ErrorKind::kUndefinedRatio,
                "block " + std::to_string(j) + " is empty; Bernstein ratio undefined");
  }
  return std::ldexp(std::sqrt(e1 / e0), -j);
}

double min_bernstein_ratio(const DyadicPartition& part) {
  double best = std::numeric_limits<double>::infinity();
  const auto r = part.radius();
  for (int j = 0; j <= part.j_max(); ++j) {
    const auto w = part.weights(j);
    for (std::size_t q = 0; q < r.size(); ++q) {
      if (w[q] > 0.0) best = std::min(best, std::ldexp(r[q], -j));
    }
  }
  return best;
}

// ---------------------------------------------------------------- metrics

void WeakMetricConfig::validate() const {
  if (!(s > 0.0 && s < 0.5)) {
    throw Error(ErrorKind::kConfiguration,
                "besov.s: expected 0 < s < 1/2, got " + std::to_string(s));
  }
}

TwinDiff TwinDiff::between(const FrameField& fa, const VelocityField& va, const FrameField& fb,
                           const VelocityField& vb) {
  TwinDiff d;
  d.dv = {va[0] - vb[0], va[1] - vb[1]};
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) d.dF[a][c] = fa.n[a][c] - fb.n[a][c];
  }
  return d;
}

std::vector<const ScalarField*> TwinDiff::frame_components() const {
  std::vector<const ScalarField*> out;
  for (const auto& a : dF) {
    for (const auto& c : a) out.push_back(&c);
  }
  return out;
}

std::vector<const ScalarField*> TwinDiff::velocity_components() const {
  return {&dv[0], &dv[1]};
}

WeakMetrics weak_metrics(const Spectral& sp, const DyadicPartition& part, const TwinDiff& d,
                         const WeakMetricConfig& cfg) {
  cfg.validate();
  const auto ev = block_energies(sp, part, d.velocity_components());
  const auto ef = block_energies(sp, part, d.frame_components());
  WeakMetrics m;
  for (int j = -1; j <= part.j_max(); ++j) {
    const auto k = static_cast<std::size_t>(j + 1);
    m.V = std::max(m.V, std::exp2(-2.0 * cfg.s * j) * ev[k]);
    m.U = std::max(m.U, std::exp2(2.0 * (1.0 - cfg.s) * j) * ef[k]);
  }
  m.Phi = m.V + m.U;
  return m;
}

double wj_functional(const Spectral& sp, const DyadicPartition& part, const TwinDiff& d,
                     const FrameField& fa, const ElasticParams& p, int j) {
  require_block(part, j);
  require_shape(fa, sp.grid(), "wj_functional");
  FrameField block(sp.grid());
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) block.n[a][c] = delta_j(sp, part, d.dF[a][c], j);
  }
  const FrameGradient g = frame_gradient(sp, block);
  ScalarField density(sp.grid());
  for (std::size_t q = 0; q < density.size(); ++q) {
    // Same quadratic form as the split density, evaluated on the block
    // gradients with the twist directions taken from state a.
    density[q] = density_split_at(fa.at(q), {g.at(0, q), g.at(1, q), g.at(2, q)}, p);
  }
  return sp.integrate(density);
}

double wj_constant(const DyadicPartition& part, const ElasticParams& p) {
  const double k0 = part.grid().fundamental();
  const double r = min_bernstein_ratio(part);
  return 0.5 * p.gamma_min() * k0 * k0 * r * r;
}

MetricOrdering metric_ordering(const Spectral& sp, const DyadicPartition& part, const TwinDiff& d,
                               const FrameField& fa, const ElasticParams& p,
                               const WeakMetricConfig& cfg) {
  cfg.validate();
  const auto ef = block_energies(sp, part, d.frame_components());
  MetricOrdering o;
  double sup = 0.0;
  for (int j = -1; j <= part.j_max(); ++j) {
    sup = std::max(sup, std::exp2(-2.0 * cfg.s * j) * wj_functional(sp, part, d, fa, p, j));
    o.U = std::max(o.U, std::exp2(2.0 * (1.0 - cfg.s) * j) * ef[static_cast<std::size_t>(j + 1)]);
  }
  o.W = sup + ef[0];
  // Block -1 of U carries 2^{-2(1-s)} and is bounded by the explicit low term.
  o.c = std::min(wj_constant(part, p), std::exp2(2.0 * (1.0 - cfg.s)));
  return o;
}

std::array<double, 3> h_delta_diag(const Spectral& sp, const DyadicPartition& part,
                                   const FrameField& fa, const VariationalForces& ha,
                                   const VariationalForces& hb, int j) {
  require_block(part, j);
  const Grid2D& g = sp.grid();
  require_shape(fa, g, "h_delta_diag");
  std::array<Vec3Field, 3> dh;
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) {
      require_shape(ha.h[a][c], g, "h_delta_diag");
      require_shape(hb.h[a][c], g, "h_delta_diag");
      dh[a][c] = delta_j(sp, part, ha.h[a][c] - hb.h[a][c], j);
    }
  }
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const int p1 = (k + 1) % 3, p2 = (k + 2) % 3;
    ScalarField hk(g);
    for (std::size_t q = 0; q < hk.size(); ++q) {
      double v = 0.0;
      for (int c = 0; c < 3; ++c) {
        v += fa.n[p1][c][q] * dh[p2][c][q] - fa.n[p2][c][q] * dh[p1][c][q];
      }
      hk[q] = v;
    }
    out[k] = std::sqrt(sp.l2_squared(hk));
  }
  return out;
}

double regularity_functional(const Spectral& sp, const FrameField& fa, const VelocityField& va,
                             const FrameField& fb, const VelocityField& vb,
                             const ElasticParams& ep, const HydroParams& hp) {
  const Grid2D& g = sp.grid();
  require_shape(fa, g, "regularity_functional");
  require_shape(fb, g, "regularity_functional");
  const std::size_t np = g.points();

  // |grad v|^2 and |v|^4 of the pair.
  double grad_v2 = 0.0;
  ScalarField v2(g);
  for (const VelocityField* v : {&va, &vb}) {
    for (int i = 0; i < 2; ++i) {
      require_shape((*v)[i], g, "regularity_functional");
      const Spectrum s = sp.forward((*v)[i]);
      grad_v2 += weighted_energy(sp, s, [&](std::size_t, std::size_t a, std::size_t b) {
        return sp.kx(a) * sp.kx(a) + sp.ky(b) * sp.ky(b);
      });
      for (std::size_t q = 0; q < np; ++q) v2[q] += (*v)[i][q] * (*v)[i][q];
    }
  }
  double v4 = 0.0;
  {
    ScalarField sq(g);
    for (std::size_t q = 0; q < np; ++q) sq[q] = v2[q] * v2[q];
    v4 = sp.integrate(sq);
  }

  // Frame gradients of the pair: L^2, L^4 and second-derivative norms.
  double grad_f2 = 0.0, hess_f2 = 0.0;
  ScalarField gf2(g);
  for (const FrameField* f : {&fa, &fb}) {
    const FrameGradient gr = frame_gradient(sp, *f);
    for (int a = 0; a < 3; ++a) {
      for (int c = 0; c < 3; ++c) {
        const Spectrum s = sp.forward(f->n[a][c]);
        hess_f2 += weighted_energy(sp, s, [&](std::size_t, std::size_t i, std::size_t j) {
          const double k2 = sp.kx(i) * sp.kx(i) + sp.ky(j) * sp.ky(j);
          return k2 * k2;
        });
        for (int dir = 0; dir < 2; ++dir) {
          const ScalarField& d = gr.d[a][c][dir];
          for (std::size_t q = 0; q < np; ++q) gf2[q] += d[q] * d[q];
        }
      }
    }
  }
  grad_f2 = sp.integrate(gf2);
  double gf4 = 0.0;
  {
    ScalarField sq(g);
    for (std::size_t q = 0; q < np; ++q) sq[q] = gf2[q] * gf2[q];
    gf4 = sp.integrate(sq);
  }

  // d_t of frame a from the frame equation.
  double dt_f2 = 0.0;
  {
    const VariationalForces vf = variational_forces(sp, fa, ep);
    const Kinematics kin = kinematics(sp, va);
    const Rates r = corotational_rates(fa, kin, vf.ml, hp);
    const auto rhs = frame_rhs(sp, fa, r, va);
    for (const auto& a : rhs) {
      for (const auto& c : a) dt_f2 += sp.l2_squared(c);
    }
  }

  // ||grad p||_{H^1}^2 = ||grad p||^2 + ||grad^2 p||^2.
  return 1.0 + grad_v2 + v4 + gf4 + dt_f2 + (grad_f2 + hess_f2) + hess_f2;
}

}  // namespace biaxframe
