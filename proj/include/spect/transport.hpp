#pragma once

// Forward transport by scattering order. Photons travel along straight lines,
// are removed at rate a and re-emitted isotropically at rate C * a; the
// detectors see the outgoing ballistic (order 0) and single-scatter (order 1)
// intensities.

#include "spect/grid.hpp"
#include "spect/transforms.hpp"

namespace spect {

/// Attenuation (1/length) and source density on a shared grid.
struct CoeffPair {
    ScalarField a;
    ScalarField f;

    CoeffPair() = default;
    CoeffPair(ScalarField a_, ScalarField f_);

    const GridSpec& spec() const { return a.spec(); }
};

/// Boundary traces: a0 = R_a f, a1 = C R_a[a M[a, f]].
struct MeasurementPair {
    Sinogram a0;
    Sinogram a1;
    double c_scatter = 0.0;
};

/// Default scattering constant: isotropic re-emission with scattering equal
/// to the total attenuation.
inline constexpr double default_c_scatter = 0.25 / 3.14159265358979323846;

// Frame kernels: operate on ray-aligned frames (rows run along theta).

/// steps(i, j) = exp(-h (a(i, j-1) + a(i, j)) / 2) for j >= 1, 1 at j = 0.
ScalarField step_factors(const ScalarField& a_frame);

/// Trapezoid solution of  d/dt u + a u = src  from -infinity along each row:
/// u(j) = h sum_{k<=j} c_k src(k) exp(-int_{x_k}^{x_j} a), c_j = 1/2.
void incoming_sweep(const ScalarField& steps, const ScalarField& src_frame, ScalarField& out);

// Operations.

/// u0(x, theta) = int_{-inf}^0 f(x + t theta) exp(-int_t^0 a(x + s theta) ds) dt.
ScalarField solve_ballistic(const CoeffPair& pair, double theta);

/// M[a, f](x) = int_{S^1} u0(x, theta) dtheta, accumulated one angle at a time.
ScalarField focused_transform(const CoeffPair& pair, const AngleSet& angles);

/// One attenuated half-line sweep with effective source C * a * source.
/// With source = M this is the order-1 field; with source = the angular
/// integral of order i-1 it is order i.
ScalarField solve_scatter_order(const CoeffPair& pair, const ScalarField& source, double theta, double c_scatter);

MeasurementPair albedo(const CoeffPair& pair, const AngleSet& angles, double c_scatter);

}  // namespace spect
