#include "biaxframe/hydrodynamics.hpp"

#include <cmath>
#include <sstream>

#include "biaxframe/error.hpp"

namespace biaxframe {

// ---------------------------------------------------------------- validation

std::vector<Violation> validate(const HydroParams& p) {
  std::vector<Violation> out;
  auto num = [](double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  };
  if (!(p.eta > 0.0) || !std::isfinite(p.eta)) {
    out.push_back({"hydro.eta", "eta > 0", "eta = " + num(p.eta)});
  }
  for (int i = 0; i < 6; ++i) {
    const std::string key = "beta" + std::to_string(i);
    if (!std::isfinite(p.beta[i])) {
      out.push_back({"hydro." + key, key + " finite", key + " = " + num(p.beta[i])});
    } else if (i > 0 && p.beta[i] < 0.0) {
      out.push_back({"hydro." + key, key + " >= 0", key + " = " + num(p.beta[i])});
    }
  }
  for (int k = 0; k < 3; ++k) {
    const std::string c = "chi" + std::to_string(k + 1);
    if (!(p.chi[k] > 0.0) || !std::isfinite(p.chi[k])) {
      out.push_back({"hydro.chi[" + std::to_string(k) + "]", c + " > 0", c + " = " + num(p.chi[k])});
    }
    if (!std::isfinite(p.eta_rot[k])) {
      out.push_back({"hydro.eta_rot[" + std::to_string(k) + "]", "eta" + std::to_string(k + 1) + " finite",
                     num(p.eta_rot[k])});
    }
  }
  const auto& b = p.beta;
  if (b[0] * b[0] > b[1] * b[2]) {
    out.push_back({"hydro.beta0", "beta0^2 <= beta1*beta2",
                   num(b[0] * b[0]) + " > " + num(b[1] * b[2])});
  }
  // eta_k pairs with the beta of the symmetric partner of the rotation about n_k.
  const int partner[3] = {5, 4, 3};
  for (int k = 0; k < 3; ++k) {
    const double lhs = p.eta_rot[k] * p.eta_rot[k];
    const double rhs = b[partner[k]] * p.chi[k];
    if (lhs > rhs) {
      const std::string e = "eta" + std::to_string(k + 1);
      out.push_back({"hydro.eta_rot[" + std::to_string(k) + "]",
                     e + "^2 <= beta" + std::to_string(partner[k]) + "*chi" + std::to_string(k + 1),
                     num(lhs) + " > " + num(rhs)});
    }
  }
  return out;
}

std::string format_violations(const std::vector<Violation>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << "; ";
    os << v[i].key << ": violates " << v[i].inequality << " (" << v[i].detail << ")";
  }
  return os.str();
}

void require_valid(const HydroParams& p) {
  const auto v = validate(p);
  if (!v.empty()) throw Error(ErrorKind::kParameter, format_violations(v));
}

// ---------------------------------------------------------------- kinematics

Mat3 Kinematics::A_at(std::size_t p) const {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = A[i][j][p];
  }
  return m;
}

Mat3 Kinematics::Omega_at(std::size_t p) const {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = Omega[i][j][p];
  }
  return m;
}

Kinematics kinematics(const Spectral& sp, const VelocityField& v) {
  const Grid2D& g = sp.grid();
  require_shape(v[0], g, "kinematics");
  require_shape(v[1], g, "kinematics");
  Kinematics k{make_tensor33(g), make_tensor33(g), make_tensor33(g)};
  k.kappa[0][0] = sp.dx(v[0]);
  k.kappa[0][1] = sp.dy(v[0]);
  k.kappa[1][0] = sp.dx(v[1]);
  k.kappa[1][1] = sp.dy(v[1]);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (std::size_t p = 0; p < g.points(); ++p) {
        const double kij = k.kappa[i][j][p], kji = k.kappa[j][i][p];
        k.A[i][j][p] = 0.5 * (kij + kji);
        k.Omega[i][j][p] = 0.5 * (kij - kji);
      }
    }
  }
  return k;
}

// ---------------------------------------------------------------- rates

Vec3 corotational_rates_at(const Frame& f, const Mat3& A, const Mat3& Omega, const Vec3& ml,
                           const HydroParams& p) {
  // Omega.a_k / 2 = n_{k+1}^T Omega n_{k+2}; A.s for s = sym(n_a, n_b) is n_a^T A n_b.
  const double wa1 = f.n2.dot(Omega * f.n3);
  const double wa2 = f.n3.dot(Omega * f.n1);
  const double wa3 = f.n1.dot(Omega * f.n2);
  const double as5 = f.n2.dot(A * f.n3);
  const double as4 = f.n1.dot(A * f.n3);
  const double as3 = f.n1.dot(A * f.n2);
  return Vec3(-wa1 + p.eta_rot[0] / p.chi[0] * as5 - ml(0) / p.chi[0],
              -wa2 + p.eta_rot[1] / p.chi[1] * as4 - ml(1) / p.chi[1],
              -wa3 + p.eta_rot[2] / p.chi[2] * as3 - ml(2) / p.chi[2]);
}

Rates corotational_rates(const FrameField& f, const Kinematics& kin,
                         const std::array<ScalarField, 3>& ml, const HydroParams& p) {
  const std::size_t np = f.points();
  for (const auto& m : ml) {
    if (m.size() != np) throw Error(ErrorKind::kDimension, "corotational_rates: ml shape");
  }
  Rates r = {f.n[0][0], f.n[0][0], f.n[0][0]};
  parallel_for(np, [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q) {
      const Vec3 n = corotational_rates_at(f.at(q), kin.A_at(q), kin.Omega_at(q),
                                           Vec3(ml[0][q], ml[1][q], ml[2][q]), p);
      for (int k = 0; k < 3; ++k) r[k][q] = n(k);
    }
  });
  return r;
}

std::array<Vec3Field, 3> frame_rhs(const FrameField& f, const FrameGradient& grads,
                                   const Rates& rates, const VelocityField& v) {
  const std::size_t np = f.points();
  for (const auto& r : rates) {
    if (r.size() != np) throw Error(ErrorKind::kDimension, "frame_rhs: rates shape");
  }
  if (v[0].size() != np || v[1].size() != np) {
    throw Error(ErrorKind::kDimension, "frame_rhs: velocity shape");
  }
  std::array<Vec3Field, 3> out;
  for (auto& a : out) a = {f.n[0][0], f.n[0][0], f.n[0][0]};
  parallel_for(np, [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q) {
      const Frame fr = f.at(q);
      const Vec3 omega = rates[0][q] * fr.n1 + rates[1][q] * fr.n2 + rates[2][q] * fr.n3;
      for (int a = 0; a < 3; ++a) {
        const Vec3 rot = omega.cross(fr[a]);
        for (int c = 0; c < 3; ++c) {
          const double adv = v[0][q] * grads.d[a][c][0][q] + v[1][q] * grads.d[a][c][1][q];
          out[a][c][q] = rot(c) - adv;
        }
      }
    }
  });
  return out;
}

std::array<Vec3Field, 3> frame_rhs(const Spectral& sp, const FrameField& f, const Rates& rates,
                                   const VelocityField& v) {
  return frame_rhs(f, frame_gradient(sp, f), rates, v);
}

// ---------------------------------------------------------------- stress

namespace {

// Same tensors as local_basis, without the orthonormality check: RK stages
// evaluate the stress on frames that have drifted off SO(3) by O(dt^2).
LocalBasis basis_of(const Frame& f) {
  LocalBasis b;
  b.s[0] = f.n1 * f.n1.transpose() - Mat3::Identity() / 3.0;
  b.s[1] = f.n2 * f.n2.transpose() - f.n3 * f.n3.transpose();
  b.s[2] = sym_outer(f.n1, f.n2);
  b.s[3] = sym_outer(f.n1, f.n3);
  b.s[4] = sym_outer(f.n2, f.n3);
  b.a[0] = f.n2 * f.n3.transpose() - f.n3 * f.n2.transpose();
  b.a[1] = f.n3 * f.n1.transpose() - f.n1 * f.n3.transpose();
  b.a[2] = f.n1 * f.n2.transpose() - f.n2 * f.n1.transpose();
  return b;
}

}  // namespace

Mat3 viscous_stress_at(const Frame& f, const Mat3& A, const Mat3& Omega, const Vec3& rates,
                       const HydroParams& p) {
  const LocalBasis lb = basis_of(f);
  const auto& b = p.beta;
  const double as1 = dot(A, lb.s[0]);
  const double as2 = dot(A, lb.s[1]);
  Mat3 sigma = b[1] * as1 * lb.s[0] + b[0] * as2 * lb.s[0] + b[0] * as1 * lb.s[1] +
               b[2] * as2 * lb.s[1];
  // Rotation about n_k pairs with s_5, s_4, s_3 and beta_5, beta_4, beta_3.
  const int partner[3] = {4, 3, 2};
  for (int k = 0; k < 3; ++k) {
    const Mat3& s = lb.s[partner[k]];
    const Mat3& a = lb.a[k];
    const double as = dot(A, s);
    const double rel = rates(k) + 0.5 * dot(Omega, a);  // rate relative to the fluid
    sigma += b[partner[k] + 1] * as * s - p.eta_rot[k] * rel * s -
             0.5 * p.eta_rot[k] * as * a + 0.5 * p.chi[k] * rel * a;
  }
  return sigma;
}

Tensor33Field viscous_stress(const FrameField& f, const Kinematics& kin, const Rates& rates,
                             const HydroParams& p) {
  const std::size_t np = f.points();
  Tensor33Field out;
  for (auto& row : out) row = {f.n[0][0], f.n[0][0], f.n[0][0]};
  parallel_for(np, [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q) {
      const Mat3 s = viscous_stress_at(f.at(q), kin.A_at(q), kin.Omega_at(q),
                                       Vec3(rates[0][q], rates[1][q], rates[2][q]), p);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) out[i][j][q] = s(i, j);
      }
    }
  });
  return out;
}

// ---------------------------------------------------------------- momentum

VelocityField momentum_rhs(const Spectral& sp, const VelocityField& v, const Tensor33Field& sigma,
                           const Tensor33Field& sigma_d, double eta) {
  const Grid2D& g = sp.grid();
  for (int i = 0; i < 2; ++i) {
    require_shape(v[i], g, "momentum_rhs");
    for (int j = 0; j < 2; ++j) {
      require_shape(sigma[i][j], g, "momentum_rhs");
      require_shape(sigma_d[i][j], g, "momentum_rhs");
    }
  }
  const std::size_t np = g.points();
  std::array<Spectrum, 2> vs = {sp.forward(v[0]), sp.forward(v[1])};
  std::array<std::array<ScalarField, 2>, 2> grad;  // grad[i][j] = d_j v_i
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Spectrum s = vs[i];
      if (j == 0) {
        sp.apply(s, [&sp](std::size_t a, std::size_t) { return Complex(0.0, sp.kx(a)); });
      } else {
        sp.apply(s, [&sp](std::size_t, std::size_t b) { return Complex(0.0, sp.ky(b)); });
      }
      grad[i][j] = sp.inverse(s);
    }
  }
  // Pointwise: -(v.grad)v; the stress divergence is added in Fourier space.
  std::array<ScalarField, 2> adv = {ScalarField(g), ScalarField(g)};
  std::array<std::array<ScalarField, 2>, 2> st = {{{ScalarField(g), ScalarField(g)},
                                                   {ScalarField(g), ScalarField(g)}}};
  for (std::size_t q = 0; q < np; ++q) {
    for (int i = 0; i < 2; ++i) {
      adv[i][q] = -(v[0][q] * grad[i][0][q] + v[1][q] * grad[i][1][q]);
      for (int j = 0; j < 2; ++j) st[i][j][q] = sigma[i][j][q] + sigma_d[i][j][q];
    }
  }
  std::array<Spectrum, 2> out;
  for (int i = 0; i < 2; ++i) {
    out[i] = sp.forward(adv[i]);
    const Spectrum sx = sp.forward(st[i][0]);
    const Spectrum sy = sp.forward(st[i][1]);
    const std::size_t nh = g.n() / 2 + 1;
    for (std::size_t a = 0; a < g.n(); ++a) {
      for (std::size_t b = 0; b < nh; ++b) {
        const std::size_t q = a * nh + b;
        out[i][q] += Complex(0.0, sp.kx(a)) * sx[q] + Complex(0.0, sp.ky(b)) * sy[q];
      }
    }
  }
  sp.leray_spectrum(out[0], out[1]);
  const std::size_t nh = g.n() / 2 + 1;
  for (int i = 0; i < 2; ++i) {
    for (std::size_t a = 0; a < g.n(); ++a) {
      for (std::size_t b = 0; b < nh; ++b) {
        const std::size_t q = a * nh + b;
        const double k2 = sp.kx(a) * sp.kx(a) + sp.ky(b) * sp.ky(b);
        out[i][q] -= eta * k2 * vs[i][q];
      }
    }
    sp.dealias_spectrum(out[i]);
  }
  return {sp.inverse(out[0]), sp.inverse(out[1])};
}

// ---------------------------------------------------------------- ledger

double EnergyLedger::d_total() const {
  return d_visc + d_rot[0] + d_rot[1] + d_rot[2] + d_beta12 + d_s3 + d_s4 + d_s5;
}

EnergyLedger energy_report(const Spectral& sp, const FrameField& f, const VelocityField& v,
                           const HydroParams& hp, const ElasticParams& ep) {
  const Grid2D& g = sp.grid();
  require_shape(f, g, "energy_report");
  EnergyLedger led;
  led.kinetic = 0.5 * (sp.l2_squared(v[0]) + sp.l2_squared(v[1]));
  const FrameGradient grads = frame_gradient(sp, f);
  led.elastic = sp.integrate(elastic_density_split(f, grads, ep));
  const Kinematics kin = kinematics(sp, v);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) led.d_visc += hp.eta * sp.l2_squared(kin.kappa[i][j]);
  }
  const VariationalForces vf = variational_forces(sp, f, grads, ep);
  for (int k = 0; k < 3; ++k) led.d_rot[k] = sp.l2_squared(vf.ml[k]) / hp.chi[k];

  const std::size_t np = g.points();
  ScalarField beta12(g), s3(g), s4(g), s5(g);
  const auto& b = hp.beta;
  for (std::size_t q = 0; q < np; ++q) {
    const Frame fr = f.at(q);
    const Mat3 A = kin.A_at(q);
    const double as1 = fr.n1.dot(A * fr.n1);  // A.s1, A traceless
    const double as2 = fr.n2.dot(A * fr.n2) - fr.n3.dot(A * fr.n3);
    beta12[q] = b[1] * as1 * as1 + 2.0 * b[0] * as1 * as2 + b[2] * as2 * as2;
    s3[q] = fr.n1.dot(A * fr.n2);
    s4[q] = fr.n1.dot(A * fr.n3);
    s5[q] = fr.n2.dot(A * fr.n3);
  }
  auto w = [&](int beta_index, int rot) {
    return b[beta_index] - hp.eta_rot[rot] * hp.eta_rot[rot] / hp.chi[rot];
  };
  led.d_beta12 = sp.integrate(beta12);
  led.d_s3 = w(3, 2) * sp.l2_squared(s3);
  led.d_s4 = w(4, 1) * sp.l2_squared(s4);
  led.d_s5 = w(5, 0) * sp.l2_squared(s5);
  return led;
}

}  // namespace biaxframe
