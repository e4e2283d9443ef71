#pragma once

// Integral geometry on the grid: beam, Radon, weighted and attenuated Radon
// transforms, a padded spectral Hilbert transform and the explicit inverse of
// the attenuated Radon transform.
//
// Conventions (shared by every module):
//   theta      = (cos t, sin t)
//   theta_perp = (-sin t, cos t)              counterclockwise quarter turn
//   line (s, theta) = { s theta_perp + t theta : t real }, oriented by theta
//   Ba(x, theta)    = int_0^inf a(x + t theta) dt
//   R_a f(s, theta) = int f(s theta_perp + t theta) exp(-Ba(., theta)) dt
//   R_a^perp f(s, theta) = R_a f(-s, theta_perp)
// Ray-aligned frames (see to_frame) put the line (s_i, theta) on row i.

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "spect/grid.hpp"

namespace spect {

// ---------------------------------------------------------------------------
// Frame kernels

/// Row totals h * sum_j frame(i, j): one line integral per offset s_i.
std::vector<double> row_totals(const ScalarField& frame);

/// Row totals of the pointwise product of two frames.
std::vector<double> row_totals(const ScalarField& frame, const ScalarField& weight);

/// exp(-B) where B is the to-plus-infinity cumulative integral of the rows of
/// an attenuation frame.
ScalarField attenuation_factors(const ScalarField& a_frame);

/// out(s, theta_k) = g(-s, theta_k + pi/2). Columns are interpolated linearly
/// (periodically) in angle when the count is not a multiple of four.
Sinogram perp_reparam(const Sinogram& g);

// ---------------------------------------------------------------------------
// Transforms

ScalarField beam_transform(const ScalarField& a, double theta);

Sinogram radon(const ScalarField& f, const AngleSet& angles);

Sinogram attenuated_radon(const ScalarField& a, const ScalarField& f, const AngleSet& angles);

/// A weight w(x, theta) stored per angle in the ray-aligned frame: slice k
/// holds w(R_{theta_k} y, theta_k) at the lattice points y.
class DirectionalWeight {
public:
    DirectionalWeight(GridSpec spec, AngleSet angles, std::vector<ScalarField> frames);

    /// Evaluate fn(x, y, theta) at the frame sample points of every angle.
    static DirectionalWeight from_function(GridSpec spec, AngleSet angles,
                                           const std::function<double(double, double, double)>& fn);

    /// w(x, theta) = exp(-Ba(x, theta)).
    static DirectionalWeight beam_attenuation(const ScalarField& a, const AngleSet& angles);

    const GridSpec& spec() const { return spec_; }
    const AngleSet& angles() const { return angles_; }
    const ScalarField& frame(int k) const { return frames_[k]; }

private:
    GridSpec spec_;
    AngleSet angles_;
    std::vector<ScalarField> frames_;
};

Sinogram weighted_radon(const DirectionalWeight& w, const ScalarField& f);

// ---------------------------------------------------------------------------
// Hilbert transform

/// Discrete Hilbert transform: linear convolution with the band-limited kernel
/// 2 / (pi m) on odd offsets m, evaluated by FFT on rows of a fixed length.
/// Data should occupy at most the central half of the row so the circular
/// product does not wrap. Plans are created once; apply() is not reentrant.
class HilbertTransformer {
public:
    explicit HilbertTransformer(int length);
    ~HilbertTransformer();
    HilbertTransformer(const HilbertTransformer&) = delete;
    HilbertTransformer& operator=(const HilbertTransformer&) = delete;

    int length() const { return length_; }
    void apply(std::complex<double>* row);

private:
    int length_;
    std::vector<std::complex<double>> kernel_hat_;
    std::complex<double>* buffer_;
    void* forward_;
    void* backward_;
};

/// Per-angle Hilbert transform in s. Each column is centered in a zero-padded
/// row of pad_factor * n_s samples before the spectral multiplier.
Sinogram hilbert_rows(const Sinogram& g, int pad_factor = 4);

// ---------------------------------------------------------------------------
// Inverse attenuated Radon transform

/// Everything the inversion formula needs that depends only on the
/// attenuation: exp(+-h) on padded s-rows with h = (I + iH) R^perp a / 2, and
/// the fields exp(Ba(., theta_k_perp)). Immutable after construction apart
/// from the internal FFT scratch space, so calls must not overlap.
class NovikovCache {
public:
    NovikovCache(const ScalarField& a, const AngleSet& angles, int pad_factor = 4);

    const GridSpec& spec() const { return spec_; }
    const AngleSet& angles() const { return angles_; }

    /// Apply the inversion formula to J (the data as a function of (s, theta)).
    ScalarField invert(const Sinogram& J) const;

private:
    GridSpec spec_;
    AngleSet angles_;
    int padded_ = 0;
    int offset_ = 0;
    std::vector<std::complex<double>> exp_plus_;   // [k * padded + idx]
    std::vector<std::complex<double>> exp_minus_;  // [k * padded + idx]
    std::vector<ScalarField> beam_exp_;            // exp(Ba(x, theta_k_perp))
    std::unique_ptr<HilbertTransformer> hilbert_;
};

ScalarField novikov_inverse(const NovikovCache& cache, const Sinogram& J);
ScalarField novikov_inverse(const ScalarField& a, const Sinogram& J, int pad_factor = 4);

}  // namespace spect
