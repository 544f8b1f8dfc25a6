#pragma once

// Dyadic frequency analysis on the periodic grid.
//
// Frequencies are measured in mode units, xi = |k| L / (2 pi), so block j
// covers 2^j [3/4, 8/3] for j >= 0 and block -1 is the ball |xi| <= 4/3.
// The top block is j_max = log2(n/2) - 1, whose lower edge 2^j_max 4/3
// is the 2/3 dealiasing radius.

#include <array>
#include <span>
#include <vector>

#include "biaxframe/elasticity.hpp"
#include "biaxframe/hydrodynamics.hpp"
#include "biaxframe/spectral_field.hpp"

namespace biaxframe {

class DyadicPartition {
 public:
  explicit DyadicPartition(const Grid2D& g);

  const Grid2D& grid() const { return grid_; }
  int j_min() const { return -1; }
  int j_max() const { return j_max_; }
  bool in_range(int j) const { return j >= -1 && j <= j_max_; }

  /// Smooth annulus profile, zero outside [3/4, 8/3].
  static double phi(double xi);
  /// Low-pass profile 1 - sum_{j>=0} phi(2^-j xi), zero for xi >= 4/3.
  static double chi(double xi);
  /// Multiplier of block j at radius xi.
  static double weight(int j, double xi);

  /// Block multiplier sampled on the half-complex spectrum.
  std::span<const double> weights(int j) const;
  /// |xi| at each half-complex spectral index.
  std::span<const double> radius() const { return radius_; }

 private:
  Grid2D grid_;
  int j_max_;
  std::vector<double> radius_;
  std::vector<std::vector<double>> weights_;  // index j + 1
};

/// Throws Error(kConfiguration) if the grid admits no block above j = 0.
DyadicPartition build_partition(const Grid2D& g);

/// Delta_j f; throws Error(kIndex) for j outside [-1, j_max].
ScalarField delta_j(const Spectral& sp, const DyadicPartition& part, const ScalarField& f, int j);
/// S_j f = sum_{k <= j-1} Delta_k f, j in [-1, j_max + 1] (S_-1 = 0).
ScalarField s_j(const Spectral& sp, const DyadicPartition& part, const ScalarField& f, int j);

/// ||Delta_j f||^2 for every block, summed over the components of a vector
/// field. Entry 0 is block -1.
std::vector<double> block_energies(const Spectral& sp, const DyadicPartition& part,
                                   std::span<const ScalarField* const> components);
std::vector<double> block_energies(const Spectral& sp, const DyadicPartition& part,
                                   const ScalarField& f);

/// Nonhomogeneous B^s_{2,q} norm, q = 2 or q = infinity; other q throw
/// Error(kConfiguration).
double besov_norm(const Spectral& sp, const DyadicPartition& part, const ScalarField& f, double s,
                  double q);
/// (sum (1 + xi^2)^s |f_k|^2)^(1/2) with grid quadrature weights.
double sobolev_norm(const Spectral& sp, const ScalarField& f, double s);

/// 2^-j ||grad Delta_j f|| / ||Delta_j f|| in mode units. Throws
/// Error(kUndefinedRatio) when the block is empty.
double bernstein_ratio(const Spectral& sp, const DyadicPartition& part, const ScalarField& f, int j);
/// Smallest value the ratio can take for any j >= 0 block on this grid.
double min_bernstein_ratio(const DyadicPartition& part);

struct WeakMetricConfig {
  double s = 0.25;
  /// Throws Error(kConfiguration) unless 0 < s < 1/2.
  void validate() const;
};

/// Difference of two states, a - b.
struct TwinDiff {
  VelocityField dv;
  std::array<Vec3Field, 3> dF;

  static TwinDiff between(const FrameField& fa, const VelocityField& va, const FrameField& fb,
                          const VelocityField& vb);
  std::vector<const ScalarField*> frame_components() const;
  std::vector<const ScalarField*> velocity_components() const;
};

struct WeakMetrics {
  double V = 0.0;
  double U = 0.0;
  double Phi = 0.0;
};

WeakMetrics weak_metrics(const Spectral& sp, const DyadicPartition& part, const TwinDiff& d,
                         const WeakMetricConfig& cfg);

/// Integral of the block-j elastic quadratic form of dF, twist terms using
/// the frame of state a.
double wj_functional(const Spectral& sp, const DyadicPartition& part, const TwinDiff& d,
                     const FrameField& fa, const ElasticParams& p, int j);

/// Constant c with int W^j + ||Delta_-1 dF||^2 >= c 2^2j ||Delta_j dF||^2 on
/// every j >= 0 block: (gamma_min / 2) (2 pi / L)^2 r_min^2.
double wj_constant(const DyadicPartition& part, const ElasticParams& p);

struct MetricOrdering {
  double W = 0.0;  // sup_j 2^-2sj int W^j + ||Delta_-1 dF||^2
  double U = 0.0;
  double c = 0.0;  // constant with W >= c U
};

MetricOrdering metric_ordering(const Spectral& sp, const DyadicPartition& part, const TwinDiff& d,
                               const FrameField& fa, const ElasticParams& p,
                               const WeakMetricConfig& cfg);

/// ||n2.Delta_j dh3 - n3.Delta_j dh2|| and cyclic, frame of state a.
std::array<double, 3> h_delta_diag(const Spectral& sp, const DyadicPartition& part,
                                   const FrameField& fa, const VariationalForces& ha,
                                   const VariationalForces& hb, int j);

/// F(t) >= 1 built from both states; the time derivative of frame a comes
/// from the frame equation.
double regularity_functional(const Spectral& sp, const FrameField& fa, const VelocityField& va,
                             const FrameField& fb, const VelocityField& vb,
                             const ElasticParams& ep, const HydroParams& hp);

}  // namespace biaxframe
