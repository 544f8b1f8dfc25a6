#include "biaxframe/elasticity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biaxframe/error.hpp"

namespace biaxframe {

// ---------------------------------------------------------------- parameters

double ElasticParams::gamma_min() const {
  return std::min({gamma[0], gamma[1], gamma[2]});
}

double ElasticParams::gamma_max() const {
  return std::max({gamma[0], gamma[1], gamma[2]});
}

ElasticParams split_constants(const std::array<double, 12>& K) {
  for (std::size_t i = 0; i < K.size(); ++i) {
    if (!(K[i] > 0.0) || !std::isfinite(K[i])) {
      std::ostringstream os;
      os << "elastic constant K" << (i + 1) << " = " << K[i] << " must be positive";
      throw Error(ErrorKind::kParameter, os.str());
    }
  }
  ElasticParams p;
  p.K = K;
  // K_1..K_12 are 0-based here: K[0] = K_1.
  p.gamma[0] = std::min({K[0], K[3], K[6], K[9]});
  p.gamma[1] = std::min({K[1], K[4], K[7], K[10]});
  p.gamma[2] = std::min({K[2], K[5], K[8], K[11]});
  for (int i = 0; i < 3; ++i) p.k[i] = K[i] - p.gamma[i];
  auto& kk = p.kk;
  kk[0][0] = K[3] - p.gamma[0];   // (n1 . curl n1)^2
  kk[1][1] = K[4] - p.gamma[1];   // (n2 . curl n2)^2
  kk[2][2] = K[5] - p.gamma[2];   // (n3 . curl n3)^2
  kk[2][0] = K[6] - p.gamma[0];   // (n3 . curl n1)^2
  kk[0][1] = K[7] - p.gamma[1];   // (n1 . curl n2)^2
  kk[1][2] = K[8] - p.gamma[2];   // (n2 . curl n3)^2
  kk[1][0] = K[9] - p.gamma[0];   // (n2 . curl n1)^2
  kk[2][1] = K[10] - p.gamma[1];  // (n3 . curl n2)^2
  kk[0][2] = K[11] - p.gamma[2];  // (n1 . curl n3)^2
  return p;
}

// ---------------------------------------------------------------- frame field

FrameField::FrameField(const Grid2D& g) : n{make_vec3(g), make_vec3(g), make_vec3(g)} {}

FrameField FrameField::uniform(const Grid2D& g, const Frame& f) {
  FrameField out(g);
  for (std::size_t p = 0; p < g.points(); ++p) out.set(p, f);
  return out;
}

Frame FrameField::at(std::size_t p) const {
  Frame f;
  for (int a = 0; a < 3; ++a) {
    f[a] = Vec3(n[a][0][p], n[a][1][p], n[a][2][p]);
  }
  return f;
}

void FrameField::set(std::size_t p, const Frame& f) {
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) n[a][c][p] = f[a](c);
  }
}

void require_shape(const FrameField& f, const Grid2D& g, const char* what) {
  for (const auto& v : f.n) {
    for (const auto& c : v) require_shape(c, g, what);
  }
}

double max_orthonormality_defect(const FrameField& f) {
  double worst = 0.0;
  for (std::size_t p = 0; p < f.points(); ++p) {
    const double d = orthonormality_defect(f.at(p));
    if (!(d <= worst)) worst = d;  // NaN propagates
  }
  return worst;
}

Mat3 FrameGradient::at(int a, std::size_t p) const {
  Mat3 G = Mat3::Zero();
  for (int c = 0; c < 3; ++c) {
    G(c, 0) = d[a][c][0][p];
    G(c, 1) = d[a][c][1][p];
  }
  return G;
}

namespace {

using Spectra9 = std::array<std::array<Spectrum, 3>, 3>;

Spectra9 transform_frame(const Spectral& sp, const FrameField& f) {
  Spectra9 s;
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) s[a][c] = sp.forward(f.n[a][c]);
  }
  return s;
}

ScalarField apply_multiplier(const Spectral& sp, const Spectrum& in,
                             const std::function<Complex(std::size_t, std::size_t)>& m) {
  Spectrum s = in;
  sp.apply(s, m);
  return sp.inverse(s);
}

FrameGradient gradient_from_spectra(const Spectral& sp, const Spectra9& s) {
  FrameGradient g;
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) {
      g.d[a][c][0] = apply_multiplier(sp, s[a][c], [&sp](std::size_t i, std::size_t) {
        return Complex(0.0, sp.kx(i));
      });
      g.d[a][c][1] = apply_multiplier(sp, s[a][c], [&sp](std::size_t, std::size_t j) {
        return Complex(0.0, sp.ky(j));
      });
    }
  }
  return g;
}

void require_gradient_shape(const FrameField& f, const FrameGradient& g) {
  for (const auto& a : g.d) {
    for (const auto& c : a) {
      for (const auto& d : c) {
        if (d.size() != f.points()) {
          throw Error(ErrorKind::kDimension, "frame gradient does not match frame field");
        }
      }
    }
  }
}

std::array<Mat3, 3> local_gradients(const FrameGradient& g, std::size_t p) {
  return {g.at(0, p), g.at(1, p), g.at(2, p)};
}

/// curl of n from G(c, j) = d_j n_c with d_z = 0.
Vec3 curl_of(const Mat3& G) { return Vec3(G(2, 1), -G(2, 0), G(1, 0) - G(0, 1)); }

}  // namespace

FrameGradient frame_gradient(const Spectral& sp, const FrameField& f) {
  require_shape(f, sp.grid(), "frame_gradient");
  return gradient_from_spectra(sp, transform_frame(sp, f));
}

// ---------------------------------------------------------------- densities

double density_direct_at(const Frame& f, const std::array<Mat3, 3>& G, const ElasticParams& p) {
  const auto& K = p.K;
  std::array<double, 3> div;
  std::array<Vec3, 3> curl;
  for (int a = 0; a < 3; ++a) {
    div[a] = G[a].trace();
    curl[a] = curl_of(G[a]);
  }
  auto twist = [&](int i, int j) {  // n_i . curl n_j
    const double t = f[i].dot(curl[j]);
    return t * t;
  };
  double bulk = K[0] * div[0] * div[0] + K[1] * div[1] * div[1] + K[2] * div[2] * div[2];
  bulk += K[3] * twist(0, 0) + K[4] * twist(1, 1) + K[5] * twist(2, 2);
  bulk += K[6] * twist(2, 0) + K[7] * twist(0, 1) + K[8] * twist(1, 2);
  bulk += K[9] * twist(1, 0) + K[10] * twist(2, 1) + K[11] * twist(0, 2);
  // div[(n.grad)n - (div n)n] = tr(G G) - (tr G)^2; the second derivatives cancel.
  double surface = 0.0;
  for (int a = 0; a < 3; ++a) {
    surface += p.gamma[a] * ((G[a] * G[a]).trace() - div[a] * div[a]);
  }
  return 0.5 * (bulk + surface);
}

double density_split_at(const Frame& f, const std::array<Mat3, 3>& G, const ElasticParams& p) {
  double sum = 0.0;
  std::array<Vec3, 3> curl;
  for (int a = 0; a < 3; ++a) {
    const double div = G[a].trace();
    sum += p.gamma[a] * G[a].squaredNorm() + p.k[a] * div * div;
    curl[a] = curl_of(G[a]);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (p.kk[i][j] == 0.0) continue;
      const double t = f[i].dot(curl[j]);
      sum += p.kk[i][j] * t * t;
    }
  }
  return 0.5 * sum;
}

ScalarField elastic_density_direct(const FrameField& f, const FrameGradient& grads,
                                   const ElasticParams& p) {
  require_gradient_shape(f, grads);
  ScalarField out = f.n[0][0];
  parallel_for(f.points(), [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q) {
      out[q] = density_direct_at(f.at(q), local_gradients(grads, q), p);
    }
  });
  return out;
}

ScalarField elastic_density_split(const FrameField& f, const FrameGradient& grads,
                                  const ElasticParams& p) {
  require_gradient_shape(f, grads);
  ScalarField out = f.n[0][0];
  parallel_for(f.points(), [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q) {
      out[q] = density_split_at(f.at(q), local_gradients(grads, q), p);
    }
  });
  return out;
}

double elastic_energy(const Spectral& sp, const FrameField& f, const ElasticParams& p) {
  const FrameGradient g = frame_gradient(sp, f);
  return sp.integrate(elastic_density_split(f, g, p));
}

// ---------------------------------------------------------------- forces

std::array<ScalarField, 3> rotational_forces(const FrameField& f,
                                             const std::array<Vec3Field, 3>& h) {
  std::array<ScalarField, 3> ml = {f.n[0][0], f.n[0][0], f.n[0][0]};
  const std::size_t np = f.points();
  for (std::size_t q = 0; q < np; ++q) {
    auto nd = [&](int a, int b) {  // n_a . h_b
      return f.n[a][0][q] * h[b][0][q] + f.n[a][1][q] * h[b][1][q] +
             f.n[a][2][q] * h[b][2][q];
    };
    ml[0][q] = nd(1, 2) - nd(2, 1);
    ml[1][q] = nd(2, 0) - nd(0, 2);
    ml[2][q] = nd(0, 1) - nd(1, 0);
  }
  return ml;
}

namespace {

VariationalForces forces_from(const Spectral& sp, const FrameField& f, const Spectra9& s,
                              const FrameGradient& grads, const ElasticParams& p) {
  const Grid2D& g = sp.grid();
  const std::size_t np = g.points();
  VariationalForces vf;

  // gamma_a Lap n_a + k_a grad div n_a
  for (int a = 0; a < 3; ++a) {
    vf.h[a] = make_vec3(g);
    Spectrum lap_mix[3];
    for (int c = 0; c < 3; ++c) lap_mix[c] = s[a][c];
    const std::size_t nh = g.n() / 2 + 1;
    for (std::size_t i = 0; i < g.n(); ++i) {
      for (std::size_t j = 0; j < nh; ++j) {
        const std::size_t q = i * nh + j;
        const double kx = sp.kx(i), ky = sp.ky(j);
        const double k2 = kx * kx + ky * ky;
        // i k (i k . n) = -k (k . n)
        const Complex kn = kx * s[a][0][q] + ky * s[a][1][q];
        lap_mix[0][q] = -p.gamma[a] * k2 * s[a][0][q] - p.k[a] * kx * kn;
        lap_mix[1][q] = -p.gamma[a] * k2 * s[a][1][q] - p.k[a] * ky * kn;
        lap_mix[2][q] = -p.gamma[a] * k2 * s[a][2][q];
      }
    }
    for (int c = 0; c < 3; ++c) vf.h[a][c] = sp.inverse(lap_mix[c]);
  }

  bool any_twist = false;
  for (const auto& row : p.kk) {
    for (double v : row) any_twist = any_twist || v != 0.0;
  }

  if (any_twist) {
    std::array<Vec3Field, 3> curl;
    for (int a = 0; a < 3; ++a) curl[a] = make_vec3(g);
    std::array<std::array<ScalarField, 3>, 3> twist;  // twist[i][j] = n_i . curl n_j
    for (auto& row : twist) row = {ScalarField(g), ScalarField(g), ScalarField(g)};
    for (std::size_t q = 0; q < np; ++q) {
      const Frame fr = f.at(q);
      std::array<Vec3, 3> c;
      for (int a = 0; a < 3; ++a) {
        c[a] = curl_of(grads.at(a, q));
        for (int d = 0; d < 3; ++d) curl[a][d][q] = c[a](d);
      }
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) twist[i][j][q] = fr[i].dot(c[j]);
      }
    }
    for (int a = 0; a < 3; ++a) {
      // - sum_j k_ja curl( (n_j . curl n_a) n_j )
      Vec3Field Q = make_vec3(g);
      bool any = false;
      for (int j = 0; j < 3; ++j) {
        const double w = p.kk[j][a];
        if (w == 0.0) continue;
        any = true;
        for (int c = 0; c < 3; ++c) {
          for (std::size_t q = 0; q < np; ++q) Q[c][q] += w * twist[j][a][q] * f.n[j][c][q];
        }
      }
      if (any) {
        const Vec3Field cq = sp.curl3(Q);
        for (int c = 0; c < 3; ++c) vf.h[a][c] -= cq[c];
      }
      // - sum_j k_aj (n_a . curl n_j) curl n_j
      for (int j = 0; j < 3; ++j) {
        const double w = p.kk[a][j];
        if (w == 0.0) continue;
        for (int c = 0; c < 3; ++c) {
          for (std::size_t q = 0; q < np; ++q) {
            vf.h[a][c][q] -= w * twist[a][j][q] * curl[j][c][q];
          }
        }
      }
    }
  }

  vf.ml = rotational_forces(f, vf.h);
  return vf;
}

}  // namespace

VariationalForces variational_forces(const Spectral& sp, const FrameField& f,
                                     const ElasticParams& p) {
  require_shape(f, sp.grid(), "variational_forces");
  const Spectra9 s = transform_frame(sp, f);
  return forces_from(sp, f, s, gradient_from_spectra(sp, s), p);
}

VariationalForces variational_forces(const Spectral& sp, const FrameField& f,
                                     const FrameGradient& grads, const ElasticParams& p) {
  require_shape(f, sp.grid(), "variational_forces");
  require_gradient_shape(f, grads);
  return forces_from(sp, f, transform_frame(sp, f), grads, p);
}

// ---------------------------------------------------------------- stresses

Mat3 distortion_stress_at(const Frame& f, const std::array<Mat3, 3>& G, const ElasticParams& p) {
  // Index convention: G_a(c, j) = d_j n_{a,c}; sigma(i, j) pairs d_i n with
  // the derivative of f with respect to d_j n.
  Mat3 sigma = Mat3::Zero();
  for (int a = 0; a < 3; ++a) {
    const Mat3& Ga = G[a];
    const double div = Ga.trace();
    // -gamma_a d_j n_ak d_i n_ak - k_a (div n_a) d_i n_aj
    sigma -= p.gamma[a] * Ga.transpose() * Ga;
    sigma -= p.k[a] * div * Ga.transpose();
    // S(p, j) = d_j n_ap - d_p n_aj
    const Mat3 S = Ga - Ga.transpose();
    const Mat3 GtS = Ga.transpose() * S;  // (i, j) -> sum_p S(p, j) d_i n_ap
    for (int b = 0; b < 3; ++b) {
      const double w = p.kk[b][a];
      if (w == 0.0) continue;
      const Vec3& nb = f[b];
      // n_bj n_bl (d_p n_al - d_l n_ap) d_i n_ap
      const Vec3 u = Ga.transpose() * (S.transpose() * nb);
      // n_bp n_bl (d_l n_aj - d_j n_al) d_i n_ap
      const Vec3 gn = Ga.transpose() * nb;
      const Vec3 sn = S * nb;
      sigma -= w * (GtS + u * nb.transpose() + gn * sn.transpose());
    }
  }
  return sigma;
}

Tensor33Field distortion_stress(const FrameField& f, const FrameGradient& grads,
                                const ElasticParams& p) {
  require_gradient_shape(f, grads);
  const std::size_t np = f.points();
  Tensor33Field out;
  for (auto& row : out) row = {f.n[0][0], f.n[0][0], f.n[0][0]};
  parallel_for(np, [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q) {
      const Mat3 s = distortion_stress_at(f.at(q), local_gradients(grads, q), p);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) out[i][j][q] = s(i, j);
      }
    }
  });
  return out;
}

Tensor33Field distortion_stress(const Spectral& sp, const FrameField& f,
                                const ElasticParams& p) {
  return distortion_stress(f, frame_gradient(sp, f), p);
}

Vec2Field body_force(const FrameField& f, const FrameGradient& grads,
                     const VariationalForces& vf) {
  require_gradient_shape(f, grads);
  for (const auto& m : vf.ml) {
    if (m.size() != f.points()) {
      throw Error(ErrorKind::kDimension, "rotational forces do not match frame field");
    }
  }
  Vec2Field out = {f.n[0][0], f.n[0][0]};
  const std::size_t np = f.points();
  for (std::size_t q = 0; q < np; ++q) {
    for (int i = 0; i < 2; ++i) {
      auto dn_dot = [&](int a, int b) {  // d_i n_a . n_b
        return grads.d[a][0][i][q] * f.n[b][0][q] + grads.d[a][1][i][q] * f.n[b][1][q] +
               grads.d[a][2][i][q] * f.n[b][2][q];
      };
      out[i][q] = dn_dot(0, 1) * vf.ml[2][q] + dn_dot(2, 0) * vf.ml[1][q] +
                  dn_dot(1, 2) * vf.ml[0][q];
    }
  }
  return out;
}

Vec2Field body_force(const Spectral& sp, const FrameField& f, const VariationalForces& vf) {
  return body_force(f, frame_gradient(sp, f), vf);
}

}  // namespace biaxframe
