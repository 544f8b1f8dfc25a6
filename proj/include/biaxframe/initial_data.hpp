#pragma once

// Built-in initial data: smooth band-limited rotations of a uniform frame,
// Taylor-Green and random divergence-free velocities, and twin perturbations.

#include <cstdint>

#include "biaxframe/elasticity.hpp"
#include "biaxframe/hydrodynamics.hpp"
#include "biaxframe/spectral_field.hpp"

namespace biaxframe {

/// Random real field sum a_m cos(k.x) + b_m sin(k.x) over 0 < |m| <= modes,
/// coefficients damped by 1 / (1 + |m|^2), scaled so that max |f| = 1.
ScalarField random_smooth_field(const Grid2D& g, int modes, std::uint64_t seed);

/// Frame R(omega(x)) base, omega a smooth random field with max |omega| <= amplitude.
FrameField random_rotation_frame(const Grid2D& g, const Frame& base, double amplitude, int modes,
                                 std::uint64_t seed);

/// v = a (sin kx cos ky, -cos kx sin ky), k = mode 2 pi / L.
VelocityField taylor_green(const Grid2D& g, double amplitude, int mode = 1);

/// Curl of a random smooth stream function, dealiased, max |v| = amplitude.
VelocityField random_divfree_velocity(const Spectral& sp, double amplitude, int modes,
                                      std::uint64_t seed);

/// Rotates every frame by eps * omega(x) and adds eps * w(x), with omega and
/// w smooth unit-amplitude fields drawn from `seed`.
void perturb(const Spectral& sp, FrameField& f, VelocityField& v, double eps, int modes,
             std::uint64_t seed);

}  // namespace biaxframe
