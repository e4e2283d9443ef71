#pragma once

// Test coefficient pairs: a radially symmetric pair (ballistic data alone
// cannot separate a from f), a high-contrast annular attenuation with an
// asymmetric source, and piecewise-constant discs.

#include <optional>
#include <string>
#include <string_view>

#include "spect/grid.hpp"
#include "spect/transport.hpp"

namespace spect {

enum class PhantomFamily { radial, trapping, discs };

std::optional<PhantomFamily> parse_family(std::string_view name);
std::string family_name(PhantomFamily family);

struct PhantomSpec {
    PhantomFamily family = PhantomFamily::discs;
    GridSpec grid{128};
    /// Peak attenuation and peak source. The defaults are family-dependent
    /// (see the generators) and used when these are unset.
    std::optional<double> amplitude_a;
    std::optional<double> amplitude_f;
};

/// 1 on r <= r0, cos^2 ramp to 0 at r1.
double radial_taper(double r, double r0, double r1);

/// a = 0.4 exp(-r^2 / (2 * 0.35^2)), f = ring exp(-(r - 0.45)^2 / (2 * 0.12^2))
/// scaled to max 1, both tapered to zero between r = 0.6 and 0.9.
CoeffPair make_radial_pair(const GridSpec& grid, double amplitude_a = 0.4, double amplitude_f = 1.0);

/// a = annulus of radius 0.5 and width 0.12 scaled to max 0.8; f = two
/// off-center bumps scaled to max 1.
CoeffPair make_trapping_pair(const GridSpec& grid, double amplitude_a = 0.8, double amplitude_f = 1.0);

/// Piecewise constant, 4x4 supersampled per cell. a: disc of 0.3 (radius
/// 0.8) with inclusions of 0.6 and 0.15 replacing the background; f: three
/// disjoint discs of 1.0, 0.7 and 0.4. Levels scale with the peaks.
CoeffPair make_discontinuous_pair(const GridSpec& grid, double amplitude_a = 0.6, double amplitude_f = 1.0);

CoeffPair make_phantom(const PhantomSpec& spec);

}  // namespace spect
