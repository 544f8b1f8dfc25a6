#pragma once

// Pointwise SO(3) calculus on orthonormal frames (n1, n2, n3).
//
// A 3x3 matrix and a triple of 3-vectors are the same object here: row a of
// the matrix is the a-th vector of the triple. A frame is stored the same way,
// so `Frame::matrix()` has rows n1, n2, n3 and determinant +1.

#include <array>

#include <Eigen/Dense>

namespace biaxframe {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Tolerance used when a frame is constructed or handed to a pointwise op.
inline constexpr double kFrameTolerance = 1e-12;
/// Tolerance for runtime drift monitoring of integrated frame fields.
inline constexpr double kFrameDriftTolerance = 1e-8;

struct Frame {
  Vec3 n1 = Vec3::UnitX();
  Vec3 n2 = Vec3::UnitY();
  Vec3 n3 = Vec3::UnitZ();

  static Frame identity() { return {}; }
  static Frame from_matrix(const Mat3& rows);

  const Vec3& operator[](int a) const;
  Vec3& operator[](int a);

  Mat3 matrix() const;
};

/// max over |n_a|-1, n_a.n_b (a != b), and det-1.
double orthonormality_defect(const Frame& f);
bool is_valid(const Frame& f, double tol = kFrameTolerance);
/// Throws Error(kInvalidFrame) unless `f` is orthonormal and right-handed.
void require_valid(const Frame& f, double tol = kFrameTolerance);

/// Rotation matrix exp([omega]_x) (Rodrigues).
Mat3 rotation_matrix(const Vec3& omega);
/// Frame whose vectors are R e_a for R = rotation_matrix(omega).
Frame rotated(const Frame& f, const Vec3& omega);

struct TangentBases {
  std::array<Mat3, 3> V;  // basis of the tangent space at the frame
  std::array<Mat3, 6> W;  // basis of its orthogonal complement
};

TangentBases tangent_bases(const Frame& f);

/// (L_k n1, L_k n2, L_k n3) as matrix rows, k in {1,2,3}; L_k n_l = eps^{klp} n_p.
Mat3 lk_apply(int k, const Frame& f);

struct LocalBasis {
  std::array<Mat3, 5> s;  // symmetric traceless
  std::array<Mat3, 3> a;  // antisymmetric
};

LocalBasis local_basis(const Frame& f);

struct Decomposition {
  std::array<double, 3> tangent{};
  std::array<double, 6> complement{};
};

/// Coefficients of `A` in the orthogonal basis {V_k} u {W_k}.
Decomposition decompose(const Mat3& A, const Frame& f);
Mat3 reconstruct(const Decomposition& d, const Frame& f);

/// Frobenius inner product, A.B = A_ij B_ij.
inline double dot(const Mat3& a, const Mat3& b) { return a.cwiseProduct(b).sum(); }

/// (a (x) b + b (x) a) / 2
inline Mat3 sym_outer(const Vec3& a, const Vec3& b) {
  return 0.5 * (a * b.transpose() + b * a.transpose());
}

}  // namespace biaxframe
