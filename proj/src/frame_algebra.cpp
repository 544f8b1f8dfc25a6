#include "biaxframe/frame_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biaxframe/error.hpp"

namespace biaxframe {

namespace {

Mat3 rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
  Mat3 m;
  m.row(0) = r0.transpose();
  m.row(1) = r1.transpose();
  m.row(2) = r2.transpose();
  return m;
}

}  // namespace

Frame Frame::from_matrix(const Mat3& m) {
  return Frame{m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()};
}

const Vec3& Frame::operator[](int a) const {
  switch (a) {
    case 0: return n1;
    case 1: return n2;
    case 2: return n3;
  }
  throw Error(ErrorKind::kIndex, "frame vector index must be 0, 1 or 2");
}

Vec3& Frame::operator[](int a) {
  return const_cast<Vec3&>(static_cast<const Frame&>(*this)[a]);
}

Mat3 Frame::matrix() const { return rows(n1, n2, n3); }

double orthonormality_defect(const Frame& f) {
  const Mat3 m = f.matrix();
  const double gram = (m * m.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  return std::max(gram, std::abs(m.determinant() - 1.0));
}

bool is_valid(const Frame& f, double tol) {
  const Mat3 m = f.matrix();
  if (!m.allFinite()) return false;
  if ((m * m.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  // det is looser: it accumulates the error of three products.
  return std::abs(m.determinant() - 1.0) <= 100.0 * tol;
}

void require_valid(const Frame& f, double tol) {
  if (!is_valid(f, tol)) {
    std::ostringstream os;
    os << "frame is not an orthonormal right-handed triple (defect "
       << orthonormality_defect(f) << ", tolerance " << tol << ")";
    throw Error(ErrorKind::kInvalidFrame, os.str());
  }
}

Mat3 rotation_matrix(const Vec3& omega) {
  const double theta = omega.norm();
  Mat3 k;
  k << 0.0, -omega.z(), omega.y(),
       omega.z(), 0.0, -omega.x(),
       -omega.y(), omega.x(), 0.0;
  if (theta < 1e-8) {
    // Taylor series; the truncation is below roundoff at this angle.
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * k + b * k * k;
}

Frame rotated(const Frame& f, const Vec3& omega) {
  const Mat3 r = rotation_matrix(omega);
  return Frame{r * f.n1, r * f.n2, r * f.n3};
}

TangentBases tangent_bases(const Frame& f) {
  require_valid(f);
  const Vec3 z = Vec3::Zero();
  TangentBases b;
  b.V[0] = rows(z, f.n3, -f.n2);
  b.V[1] = rows(-f.n3, z, f.n1);
  b.V[2] = rows(f.n2, -f.n1, z);
  b.W[0] = rows(z, f.n3, f.n2);
  b.W[1] = rows(f.n3, z, f.n1);
  b.W[2] = rows(f.n2, f.n1, z);
  b.W[3] = rows(f.n1, z, z);
  b.W[4] = rows(z, f.n2, z);
  b.W[5] = rows(z, z, f.n3);
  return b;
}

Mat3 lk_apply(int k, const Frame& f) {
  if (k < 1 || k > 3) {
    throw Error(ErrorKind::kIndex, "rotation axis index must be 1, 2 or 3, got " +
                                       std::to_string(k));
  }
  // Row l holds eps^{klp} n_p.
  Mat3 out = Mat3::Zero();
  for (int l = 0; l < 3; ++l) {
    for (int p = 0; p < 3; ++p) {
      const int e = (k - 1 - l) * (l - p) * (p - (k - 1)) / 2;  // Levi-Civita
      if (e != 0) out.row(l) += e * f[p].transpose();
    }
  }
  return out;
}

LocalBasis local_basis(const Frame& f) {
  require_valid(f);
  LocalBasis b;
  const Mat3 n1n1 = f.n1 * f.n1.transpose();
  const Mat3 n2n2 = f.n2 * f.n2.transpose();
  const Mat3 n3n3 = f.n3 * f.n3.transpose();
  b.s[0] = n1n1 - Mat3::Identity() / 3.0;
  b.s[1] = n2n2 - n3n3;
  b.s[2] = sym_outer(f.n1, f.n2);
  b.s[3] = sym_outer(f.n1, f.n3);
  b.s[4] = sym_outer(f.n2, f.n3);
  b.a[0] = f.n2 * f.n3.transpose() - f.n3 * f.n2.transpose();
  b.a[1] = f.n3 * f.n1.transpose() - f.n1 * f.n3.transpose();
  b.a[2] = f.n1 * f.n2.transpose() - f.n2 * f.n1.transpose();
  return b;
}

Decomposition decompose(const Mat3& A, const Frame& f) {
  const TangentBases b = tangent_bases(f);
  Decomposition d;
  for (int k = 0; k < 3; ++k) d.tangent[k] = dot(A, b.V[k]) / b.V[k].squaredNorm();
  for (int k = 0; k < 6; ++k) d.complement[k] = dot(A, b.W[k]) / b.W[k].squaredNorm();
  return d;
}

Mat3 reconstruct(const Decomposition& d, const Frame& f) {
  const TangentBases b = tangent_bases(f);
  Mat3 out = Mat3::Zero();
  for (int k = 0; k < 3; ++k) out += d.tangent[k] * b.V[k];
  for (int k = 0; k < 6; ++k) out += d.complement[k] * b.W[k];
  return out;
}

}  // namespace biaxframe
