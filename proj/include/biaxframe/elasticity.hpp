#pragma once

// Biaxial orientational elasticity on a periodic frame field: the direct
// fifteen-term density, the split form (1/2) sum gamma_i |grad n_i|^2 + W,
// variational forces h_i = -dF/dn_i, rotational forces L_k F, the distortion
// stress and the body force.

#include <array>

#include "biaxframe/frame_algebra.hpp"
#include "biaxframe/spectral_field.hpp"

namespace biaxframe {

struct ElasticParams {
  std::array<double, 12> K{};                   // K_1 .. K_12
  std::array<double, 3> gamma{};                // surface / one-constant part
  std::array<double, 3> k{};                    // splay excess k_i
  std::array<std::array<double, 3>, 3> kk{};    // kk[i][j] = k_ij, weight of (n_i . curl n_j)^2

  double gamma_min() const;
  double gamma_max() const;
};

/// Splits K_1..K_12 into gamma, k_i and k_ij. Throws Error(kParameter) if any K_i <= 0.
ElasticParams split_constants(const std::array<double, 12>& K);

/// Orthonormal frame field: n[a][c] is component c of vector n_{a+1}.
struct FrameField {
  std::array<Vec3Field, 3> n;

  FrameField() = default;
  explicit FrameField(const Grid2D& g);
  static FrameField uniform(const Grid2D& g, const Frame& f);

  std::size_t points() const { return n[0][0].size(); }
  Frame at(std::size_t p) const;
  void set(std::size_t p, const Frame& f);

  bool operator==(const FrameField&) const = default;
};

void require_shape(const FrameField& f, const Grid2D& g, const char* what);
/// Largest orthonormality defect over all points.
double max_orthonormality_defect(const FrameField& f);

/// d[a][c][dir] = d/dx_dir of n_{a+1, c}; dir 0 = x, 1 = y.
struct FrameGradient {
  std::array<std::array<Vec2Field, 3>, 3> d;

  /// G(c, j) = d_j n_{a+1, c}, with the z column zero.
  Mat3 at(int a, std::size_t p) const;
};

FrameGradient frame_gradient(const Spectral& sp, const FrameField& f);

ScalarField elastic_density_direct(const FrameField& f, const FrameGradient& grads,
                                   const ElasticParams& p);
ScalarField elastic_density_split(const FrameField& f, const FrameGradient& grads,
                                  const ElasticParams& p);

/// Pointwise densities, for callers that already hold the local data.
double density_direct_at(const Frame& f, const std::array<Mat3, 3>& G, const ElasticParams& p);
double density_split_at(const Frame& f, const std::array<Mat3, 3>& G, const ElasticParams& p);

/// Grid quadrature of the split density; this is the energy whose exact
/// discrete gradient `variational_forces` returns.
double elastic_energy(const Spectral& sp, const FrameField& f, const ElasticParams& p);

struct VariationalForces {
  std::array<Vec3Field, 3> h;   // h_i = -dF/dn_i
  std::array<ScalarField, 3> ml;  // L_k F, k = 1..3
};

VariationalForces variational_forces(const Spectral& sp, const FrameField& f,
                                     const ElasticParams& p);
VariationalForces variational_forces(const Spectral& sp, const FrameField& f,
                                     const FrameGradient& grads, const ElasticParams& p);

/// ml_1 = n2.h3 - n3.h2 and cyclic, from given forces.
std::array<ScalarField, 3> rotational_forces(const FrameField& f,
                                             const std::array<Vec3Field, 3>& h);

/// sigma^d_ij = -sum_a d f / d(d_j n_a) . d_i n_a, full 3x3 (row i, column j).
Tensor33Field distortion_stress(const FrameField& f, const FrameGradient& grads,
                                const ElasticParams& p);
Tensor33Field distortion_stress(const Spectral& sp, const FrameField& f,
                                const ElasticParams& p);
Mat3 distortion_stress_at(const Frame& f, const std::array<Mat3, 3>& G,
                          const ElasticParams& p);

/// F_i = d_i n1.n2 L3F + d_i n3.n1 L2F + d_i n2.n3 L1F (in-plane components).
Vec2Field body_force(const FrameField& f, const FrameGradient& grads,
                     const VariationalForces& vf);
Vec2Field body_force(const Spectral& sp, const FrameField& f, const VariationalForces& vf);

}  // namespace biaxframe
