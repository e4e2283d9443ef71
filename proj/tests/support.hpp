#pragma once

// Independent oracles and fixtures shared by the unit tests.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "spect/grid.hpp"

namespace spect::testing {

/// Composite Simpson rule on [t0, t1] with an even number of panels.
inline double simpson(const std::function<double(double)>& fn, double t0, double t1, int panels = 4000) {
    if (panels % 2) ++panels;
    const double dt = (t1 - t0) / panels;
    double s = fn(t0) + fn(t1);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * fn(t0 + i * dt);
    return s * dt / 3.0;
}

/// int_{t0}^{t1} fn(x + t cos(theta), y + t sin(theta)) dt.
inline double ray_integral(const std::function<double(double, double)>& fn, double x, double y, double theta,
                           double t0, double t1, int panels = 4000) {
    const double c = std::cos(theta), s = std::sin(theta);
    return simpson([&](double t) { return fn(x + t * c, y + t * s); }, t0, t1, panels);
}

inline double gaussian_bump(double x, double y, double cx, double cy, double sigma) {
    const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

/// Random smooth function: a few Gaussian bumps well inside the unit disc.
struct SmoothBumps {
    struct Bump {
        double cx, cy, sigma, weight;
    };
    std::vector<Bump> bumps;

    SmoothBumps(std::uint64_t seed, int count = 4, double spread = 0.35, bool signed_weights = true) {
        std::mt19937_64 rng(seed);
        auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        for (int i = 0; i < count; ++i) {
            const double r = spread * std::sqrt(unit());
            const double phi = 2.0 * 3.14159265358979323846 * unit();
            const double w = signed_weights ? 2.0 * unit() - 1.0 : 0.3 + 0.7 * unit();
            bumps.push_back({r * std::cos(phi), r * std::sin(phi), 0.1 + 0.08 * unit(), w});
        }
    }

    double operator()(double x, double y) const {
        double s = 0.0;
        for (const auto& b : bumps) s += b.weight * gaussian_bump(x, y, b.cx, b.cy, b.sigma);
        return s;
    }

    ScalarField field(const GridSpec& spec, double scale = 1.0) const {
        return ScalarField::sample(spec, [&](double x, double y) { return scale * (*this)(x, y); });
    }
};

inline ScalarField random_field(const GridSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ScalarField g(spec);
    for (double& v : g.values()) v = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    return g;
}

/// Relative L2 difference restricted to |x| < radius.
inline double rel_l2_disc(const ScalarField& a, const ScalarField& b, double radius = 1.0) {
    double num = 0.0, den = 0.0;
    const GridSpec& spec = b.spec();
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.n; ++j) {
            const double x = spec.coord(j), y = spec.coord(i);
            if (x * x + y * y >= radius * radius) continue;
            num += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
            den += b(i, j) * b(i, j);
        }
    return std::sqrt(num / den);
}

inline double rel_l2(std::span<const double> a, std::span<const double> b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// True when every sample is exactly zero (either sign).
template <class T>
bool is_zero(const T& g) {
    for (double v : g.values())
        if (v != 0.0) return false;
    return true;
}

template <class T>
double min_value(const T& g) {
    double m = g.values()[0];
    for (double v : g.values()) m = std::min(m, v);
    return m;
}

inline bool bit_equal(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

}  // namespace spect::testing
