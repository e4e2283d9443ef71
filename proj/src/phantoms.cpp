#include "spect/phantoms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace spect {

std::optional<PhantomFamily> parse_family(std::string_view name) {
    if (name == "radial") return PhantomFamily::radial;
    if (name == "trapping") return PhantomFamily::trapping;
    if (name == "discs") return PhantomFamily::discs;
    return std::nullopt;
}

std::string family_name(PhantomFamily family) {
    switch (family) {
        case PhantomFamily::radial: return "radial";
        case PhantomFamily::trapping: return "trapping";
        case PhantomFamily::discs: return "discs";
    }
    return "unknown";
}

double radial_taper(double r, double r0, double r1) {
    if (r <= r0) return 1.0;
    if (r >= r1) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * (r - r0) / (r1 - r0));
    return c * c;
}

namespace {

double gaussian(double d2, double sigma) { return std::exp(-d2 / (2.0 * sigma * sigma)); }

void scale_to_max(ScalarField& g, double peak) {
    const double m = max_abs(g);
    if (m > 0.0) g *= peak / m;
}

struct Disc {
    double cx, cy, r, value;
    bool contains(double x, double y) const { return (x - cx) * (x - cx) + (y - cy) * (y - cy) < r * r; }
};

template <class F>
ScalarField supersample(const GridSpec& grid, F&& value, int factor) {
    const double h = grid.spacing();
    return ScalarField::sample(grid, [&](double x, double y) {
        double s = 0.0;
        for (int p = 0; p < factor; ++p) {
            const double sy = y + h * ((p + 0.5) / factor - 0.5);
            for (int q = 0; q < factor; ++q) s += value(x + h * ((q + 0.5) / factor - 0.5), sy);
        }
        return s / (factor * factor);
    });
}

}  // namespace

CoeffPair make_radial_pair(const GridSpec& grid, double amplitude_a, double amplitude_f) {
    ScalarField a = ScalarField::sample(grid, [&](double x, double y) {
        const double r = std::hypot(x, y);
        return amplitude_a * gaussian(r * r, 0.35) * radial_taper(r, 0.6, 0.9);
    });
    ScalarField f = ScalarField::sample(grid, [](double x, double y) {
        const double r = std::hypot(x, y);
        return gaussian((r - 0.45) * (r - 0.45), 0.12) * radial_taper(r, 0.6, 0.9);
    });
    scale_to_max(f, amplitude_f);
    return CoeffPair(std::move(a), std::move(f));
}

CoeffPair make_trapping_pair(const GridSpec& grid, double amplitude_a, double amplitude_f) {
    ScalarField a = ScalarField::sample(grid, [](double x, double y) {
        const double r = std::hypot(x, y);
        return gaussian((r - 0.5) * (r - 0.5), 0.12) * radial_taper(r, 0.75, 0.9);
    });
    scale_to_max(a, amplitude_a);
    ScalarField f = ScalarField::sample(grid, [](double x, double y) {
        const double r = std::hypot(x, y);
        const double d1 = (x - 0.25) * (x - 0.25) + (y - 0.1) * (y - 0.1);
        const double d2 = (x + 0.2) * (x + 0.2) + (y + 0.3) * (y + 0.3);
        return (gaussian(d1, 0.1) + 0.6 * gaussian(d2, 0.12)) * radial_taper(r, 0.7, 0.9);
    });
    scale_to_max(f, amplitude_f);
    return CoeffPair(std::move(a), std::move(f));
}

CoeffPair make_discontinuous_pair(const GridSpec& grid, double amplitude_a, double amplitude_f) {
    const double level = amplitude_a / 0.6;
    const Disc body{0.0, 0.0, 0.8, 0.3 * level};
    const std::array<Disc, 2> inclusions{Disc{0.3, 0.25, 0.2, 0.6 * level}, Disc{-0.35, -0.2, 0.25, 0.15 * level}};
    const std::array<Disc, 3> sources{Disc{0.1, -0.35, 0.15, 1.0}, Disc{-0.35, 0.25, 0.18, 0.7},
                                      Disc{0.35, 0.3, 0.12, 0.4}};
    auto a_value = [&](double x, double y) {
        for (const Disc& d : inclusions)
            if (d.contains(x, y)) return d.value;
        return body.contains(x, y) ? body.value : 0.0;
    };
    auto f_value = [&](double x, double y) {
        for (const Disc& d : sources)
            if (d.contains(x, y)) return amplitude_f * d.value;
        return 0.0;
    };
    return CoeffPair(supersample(grid, a_value, 4), supersample(grid, f_value, 4));
}

CoeffPair make_phantom(const PhantomSpec& spec) {
    switch (spec.family) {
        case PhantomFamily::radial:
            return make_radial_pair(spec.grid, spec.amplitude_a.value_or(0.4), spec.amplitude_f.value_or(1.0));
        case PhantomFamily::trapping:
            return make_trapping_pair(spec.grid, spec.amplitude_a.value_or(0.8), spec.amplitude_f.value_or(1.0));
        case PhantomFamily::discs:
            return make_discontinuous_pair(spec.grid, spec.amplitude_a.value_or(0.6), spec.amplitude_f.value_or(1.0));
    }
    throw std::invalid_argument("make_phantom: unknown family");
}

}  // namespace spect
