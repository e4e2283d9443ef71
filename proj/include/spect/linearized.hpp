#pragma once

// Linearization of the albedo operator about a point (a, f): the differential
// DA, the preconditioned operators L and Q, the explicit left inverse of L and
// the truncated Neumann series for (L + Q)^-1. Everything is matrix-free and
// built from the per-angle frame kernels of the transport module.

#include <stdexcept>
#include <string>
#include <vector>

#include "spect/grid.hpp"
#include "spect/transforms.hpp"
#include "spect/transport.hpp"

namespace spect {

class DegenerateFocusedTransform : public std::runtime_error {
public:
    explicit DegenerateFocusedTransform(const std::string& what) : std::runtime_error(what) {}
};

/// phi(s) = 1 for |s| <= 1, cos^2(pi (|s| - 1) / 2) for 1 < |s| < 2, 0 beyond.
double cutoff_profile(double s);

/// phi sampled at the s offsets and chi(x) = phi(|x|) on the grid.
struct Cutoffs {
    std::vector<double> phi;
    ScalarField chi;

    explicit Cutoffs(const GridSpec& spec);
};

struct PerturbationPair {
    ScalarField da;
    ScalarField df;
};

/// Image of a perturbation under L or Q: (first, second) component fields.
struct FieldPair {
    ScalarField first;
    ScalarField second;
};

/// w[u, v](x, theta) = -int_{-inf}^0 exp(-Bu(x + t theta, theta)) v(x + t theta) dt.
ScalarField weight_w(const ScalarField& u, const ScalarField& v, double theta);

/// Linearization point (a, f) with every per-angle quantity the operators
/// reuse: attenuation step factors, exp(-Ba) frames, ballistic frames, the
/// weights w[a, f] and w[a, a M], M itself, the inversion cache and the
/// simulated albedo. Immutable after construction; the inversion cache owns
/// FFT scratch space, so operator calls on one point must not overlap.
class LinearizationPoint {
public:
    LinearizationPoint(CoeffPair base, AngleSet angles, double c_scatter, double m_floor_rel = 1e-6,
                       int pad_factor = 4);

    const CoeffPair& base() const { return base_; }
    const GridSpec& spec() const { return base_.spec(); }
    const AngleSet& angles() const { return angles_; }
    double c_scatter() const { return c_scatter_; }
    const ScalarField& m_field() const { return m_field_; }
    const Cutoffs& cutoffs() const { return cutoffs_; }
    const ScalarField& support() const { return support_; }
    const NovikovCache& novikov() const { return novikov_; }

    /// albedo(base), evaluated with the cached kernels.
    const MeasurementPair& simulated() const { return simulated_; }

    double m_min_on_disc() const { return m_min_; }
    double m_floor() const { return m_floor_; }
    bool degenerate() const { return !(m_min_ > m_floor_); }

    /// R_a g with the cached attenuation.
    Sinogram attenuated_radon(const ScalarField& g) const;
    /// M[a, g].
    ScalarField focused(const ScalarField& g) const;
    /// I_{w[a, f]} da and I_{w[a, a M]} da.
    Sinogram weighted_source(const ScalarField& da) const;
    Sinogram weighted_scatter(const ScalarField& da) const;
    /// a * (dM/da) da + a * M[a, df] in one sweep per angle.
    ScalarField scatter_sensitivity(const ScalarField& da, const ScalarField& df) const;

    // Used by the operators below.
    const ScalarField& steps(int k) const { return steps_[k]; }
    const ScalarField& attenuation(int k) const { return attenuation_[k]; }
    const ScalarField& ballistic(int k) const { return ballistic_[k]; }
    const ScalarField& source_frame(int k) const { return source_frames_[k]; }

private:
    CoeffPair base_;
    AngleSet angles_;
    double c_scatter_;
    Cutoffs cutoffs_;
    ScalarField support_;
    std::vector<ScalarField> steps_;
    std::vector<ScalarField> attenuation_;
    std::vector<ScalarField> source_frames_;
    std::vector<ScalarField> ballistic_;
    ScalarField m_field_;
    std::vector<ScalarField> w_source_;
    std::vector<ScalarField> w_scatter_;
    NovikovCache novikov_;
    MeasurementPair simulated_;
    double m_min_ = 0.0;
    double m_floor_ = 0.0;
};

/// (dM/da) da at the point: the exact derivative of the discrete focused
/// transform.
ScalarField d_focused(const LinearizationPoint& point, const ScalarField& da);

/// DA (da, df) = (I_{w[a,f]} da + R_a df,
///                C (I_{w[a,aM]} da + R_a(da M + a dM da + a M[a, df]))).
MeasurementPair apply_DA(const LinearizationPoint& point, const PerturbationPair& pert);

/// chi R_a^-1 (phi J).
ScalarField precondition(const LinearizationPoint& point, const Sinogram& J);

FieldPair apply_L(const LinearizationPoint& point, const PerturbationPair& pert);
FieldPair apply_Q(const LinearizationPoint& point, const PerturbationPair& pert);

/// L^-1 (g, h) = (h / M, g - chi R_a^-1 phi I_{w[a,f]} (h / M)), both
/// restricted to the unit disc. Throws DegenerateFocusedTransform when M
/// falls below the floor on the disc.
PerturbationPair apply_L_inverse(const LinearizationPoint& point, const ScalarField& g, const ScalarField& h);

struct NeumannResult {
    PerturbationPair sum;
    /// ||term_{k+1}|| / ||term_k|| for k = 0 .. terms-2.
    std::vector<double> ratios;
    bool divergent = false;
};

/// sum_{k < terms} (-L^-1 Q)^k L^-1 (g, h). A ratio >= 1 sets `divergent`;
/// the truncated sum is still returned.
NeumannResult apply_LQ_inverse(const LinearizationPoint& point, const ScalarField& g, const ScalarField& h,
                               int terms);

double pair_norm(const PerturbationPair& p);

}  // namespace spect
