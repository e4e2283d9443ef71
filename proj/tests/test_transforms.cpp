#include "doctest.h"
#include "spect/transforms.hpp"
#include "support.hpp"

#include <numbers>

using namespace spect;
using namespace spect::testing;

namespace {

Sinogram zero_sinogram(const GridSpec& spec, const AngleSet& angles) { return Sinogram(spec, angles); }

double rel_sino(const Sinogram& a, const Sinogram& b) { return rel_l2(a.values(), b.values()); }

}  // namespace

TEST_CASE("beam transform") {
    SUBCASE("zero attenuation") {
        const GridSpec spec(32);
        CHECK(max_abs(beam_transform(ScalarField(spec), 0.3)) == 0.0);
    }
    SUBCASE("full chord ahead of the left edge") {
        const GridSpec spec(128);
        const ScalarField Ba = beam_transform(disc_mask(spec, 0.5), 0.0);
        CHECK(std::abs(Ba(spec.n / 2, 0) - 1.0) <= 2.0 * spec.spacing());
    }
    SUBCASE("gaussian bump against ray quadrature") {
        const GridSpec spec(256);
        auto fn = [](double x, double y) { return gaussian_bump(x, y, 0.15, -0.1, 0.2); };
        const double theta = 2.5;
        const ScalarField Ba = beam_transform(ScalarField::sample(spec, fn), theta);
        const int probes[10][2] = {{128, 128}, {120, 160}, {100, 180}, {140, 200}, {90, 150},
                                   {150, 170}, {110, 140}, {130, 190}, {80, 160}, {160, 150}};
        for (const auto& p : probes) {
            const double want = ray_integral(fn, spec.coord(p[1]), spec.coord(p[0]), theta, 0.0, 3.0);
            CHECK(std::abs(Ba(p[0], p[1]) - want) <= 1e-2 * want);
        }
    }
    SUBCASE("vanishes once the forward ray misses the support") {
        const GridSpec spec(64);
        const ScalarField Ba = beam_transform(disc_mask(spec, 0.5), 0.0);
        for (int i = 0; i < spec.n; ++i)
            for (int j = 0; j < spec.n; ++j)
                if (spec.coord(j) > 0.5 + 2.0 * spec.spacing()) CHECK(Ba(i, j) == 0.0);
    }
}

TEST_CASE("radon transform") {
    SUBCASE("unit disc chords") {
        const GridSpec spec(128);
        const AngleSet angles(16);
        const Sinogram R = radon(disc_mask(spec, 1.0), angles);
        for (int i = 0; i < spec.n; ++i) {
            const double s = spec.coord(i);
            const double chord = 2.0 * std::sqrt(std::max(0.0, 1.0 - s * s));
            for (int k = 0; k < angles.count; ++k) CHECK(std::abs(R(i, k) - chord) <= 3.0 * spec.spacing());
        }
    }
    SUBCASE("zero") {
        const GridSpec spec(32);
        const AngleSet angles(8);
        CHECK(max_abs_diff(radon(ScalarField(spec), angles).values(), zero_sinogram(spec, angles).values()) == 0.0);
    }
    SUBCASE("evenness under (s, theta) -> (-s, theta + pi)") {
        const GridSpec spec(64);
        const AngleSet angles(24);
        const Sinogram R = radon(SmoothBumps(11).field(spec), angles);
        double worst = 0.0;
        for (int i = 0; i < spec.n; ++i)
            for (int k = 0; k < angles.count; ++k)
                worst = std::max(worst, std::abs(R(i, k) - R(spec.n - 1 - i, (k + angles.count / 2) % angles.count)));
        CHECK(worst <= 1e-10);
    }
    SUBCASE("support in s") {
        const GridSpec spec(96, 1.5);
        const AngleSet angles(12);
        const Sinogram R = radon(multiply(SmoothBumps(12).field(spec), disc_mask(spec, 1.0)), angles);
        for (int i = 0; i < spec.n; ++i)
            if (std::abs(spec.coord(i)) > 1.0 + 2.0 * spec.spacing())
                for (int k = 0; k < angles.count; ++k) CHECK(R(i, k) == 0.0);
    }
}

TEST_CASE("weighted radon transform") {
    const GridSpec spec(64);
    const AngleSet angles(16);
    const ScalarField f = SmoothBumps(21).field(spec);
    SUBCASE("unit weight is the radon transform") {
        const auto w = DirectionalWeight::from_function(spec, angles, [](double, double, double) { return 1.0; });
        CHECK(max_abs_diff(weighted_radon(w, f).values(), radon(f, angles).values()) <= 1e-14);
    }
    SUBCASE("zero source") {
        const auto w = DirectionalWeight::from_function(spec, angles, [](double x, double, double t) { return x + t; });
        CHECK(is_zero(weighted_radon(w, ScalarField(spec))));
    }
    SUBCASE("beam attenuation weight reproduces the attenuated transform") {
        const ScalarField a = clamp_nonneg(SmoothBumps(22, 3, 0.3, false).field(spec, 0.4));
        const auto w = DirectionalWeight::beam_attenuation(a, angles);
        CHECK(rel_sino(weighted_radon(w, f), attenuated_radon(a, f, angles)) <= 1e-8);
    }
    SUBCASE("weight evaluated through its frame coordinates") {
        // w(x, theta) = x . theta: the frame slice must hold the along-ray coordinate.
        const auto w = DirectionalWeight::from_function(spec, angles, [](double x, double y, double t) {
            return x * std::cos(t) + y * std::sin(t);
        });
        for (int k = 0; k < angles.count; ++k)
            for (int j = 0; j < spec.n; ++j) CHECK(w.frame(k)(5, j) == doctest::Approx(spec.coord(j)).epsilon(1e-12));
    }
    SUBCASE("grid mismatch") {
        const auto w = DirectionalWeight::from_function(spec, angles, [](double, double, double) { return 1.0; });
        CHECK_THROWS_AS(weighted_radon(w, ScalarField(GridSpec(32))), GridMismatch);
    }
}

TEST_CASE("attenuated radon transform") {
    const GridSpec spec(128);
    const AngleSet angles(32);
    const ScalarField f = SmoothBumps(31, 4, 0.35, false).field(spec);
    SUBCASE("zero attenuation is the radon transform") {
        CHECK(bit_equal(attenuated_radon(ScalarField(spec), f, angles).values(), radon(f, angles).values()));
    }
    SUBCASE("zero source") {
        CHECK(is_zero(attenuated_radon(SmoothBumps(32).field(spec), ScalarField(spec), angles)));
    }
    SUBCASE("point source at the center of a uniform disc") {
        const GridSpec fine(256);
        const double c = 0.7, sigma = 0.02;
        const ScalarField a = disc_mask(fine, 1.0) * c;
        const ScalarField src = ScalarField::sample(fine, [&](double x, double y) { return gaussian_bump(x, y, 0, 0, sigma); });
        const double mass = 2.0 * std::numbers::pi * sigma * sigma;
        const Sinogram R = attenuated_radon(a, src, AngleSet(16));
        for (int k = 0; k < 16; ++k) {
            double total = 0.0;
            for (int i = 0; i < fine.n; ++i) total += R(i, k);
            total *= fine.spacing();
            CHECK(std::abs(total - std::exp(-c) * mass) <= 0.03 * std::exp(-c) * mass);
        }
    }
    SUBCASE("attenuation only lowers nonnegative data") {
        const ScalarField a = clamp_nonneg(SmoothBumps(33, 3, 0.3, false).field(spec, 0.5));
        const Sinogram Ra = attenuated_radon(a, f, angles);
        const Sinogram R = radon(f, angles);
        for (std::size_t i = 0; i < R.values().size(); ++i) {
            CHECK(Ra.values()[i] >= 0.0);
            CHECK(Ra.values()[i] <= R.values()[i] + 1e-15);
        }
    }
    SUBCASE("linearity in the source") {
        const ScalarField a = SmoothBumps(34).field(spec, 0.3);
        const ScalarField g = SmoothBumps(35).field(spec);
        const Sinogram lhs = attenuated_radon(a, f * 2.0 + g, angles);
        const Sinogram rhs = attenuated_radon(a, f, angles) * 2.0 + attenuated_radon(a, g, angles);
        CHECK(max_abs_diff(lhs.values(), rhs.values()) <= 1e-13);
    }
    SUBCASE("grid mismatch") { CHECK_THROWS_AS(attenuated_radon(ScalarField(GridSpec(64)), f, angles), GridMismatch); }
}

TEST_CASE("perpendicular reparameterization follows its definition") {
    const GridSpec spec(64);
    const AngleSet angles(20);
    const ScalarField a = SmoothBumps(41).field(spec);
    const Sinogram perp = perp_reparam(radon(a, angles));
    for (int k = 0; k < angles.count; ++k) {
        const double theta_perp = angles.angle(k) + 0.5 * std::numbers::pi;
        const std::vector<double> direct = row_totals(to_frame(a, theta_perp));
        for (int i = 0; i < spec.n; ++i) CHECK(perp(i, k) == doctest::Approx(direct[spec.n - 1 - i]).epsilon(1e-10));
    }
}

TEST_CASE("hilbert transform") {
    const GridSpec spec(256);
    const AngleSet angles(4);
    SUBCASE("applied twice gives minus the input") {
        // Third derivative of a Gaussian: zero low moments, so Hg decays fast
        // enough that truncating it to [-L, L] between the passes is harmless.
        Sinogram g(spec, angles);
        const double sigma = 0.08;
        for (int i = 0; i < spec.n; ++i)
            for (int k = 0; k < angles.count; ++k) {
                const double u = (spec.coord(i) - 0.05 * k) / sigma;
                g(i, k) = (u * u * u - 3.0 * u) * std::exp(-0.5 * u * u);
            }
        const Sinogram hh = hilbert_rows(hilbert_rows(g));
        CHECK(rel_sino(hh * -1.0, g) <= 1e-3);
    }
    SUBCASE("tails of a positive bump are not wrapped") {
        // Away from the support, Hg(s) = (1/pi) int g(t) / (s - t) dt has no singularity.
        const double sigma = 0.05;
        auto bump = [&](double t) { return std::exp(-0.5 * t * t / (sigma * sigma)); };
        Sinogram g(spec, angles);
        for (int i = 0; i < spec.n; ++i)
            for (int k = 0; k < angles.count; ++k) g(i, k) = bump(spec.coord(i));
        const Sinogram hg = hilbert_rows(g);
        for (int i : {0, 10, 30, 220, 245, 255}) {
            const double s = spec.coord(i);
            const double want = simpson([&](double t) { return bump(t) / (s - t); }, -0.4, 0.4, 2000) / std::numbers::pi;
            CHECK(hg(i, 1) == doctest::Approx(want).epsilon(1e-3));
        }
    }
    SUBCASE("zero") {
        CHECK(is_zero(hilbert_rows(Sinogram(spec, angles))));
    }
    SUBCASE("windowed cosine becomes windowed sine") {
        const double omega = 8.0 * std::numbers::pi;
        auto window = [](double s) { return std::exp(-s * s / (2.0 * 0.3 * 0.3)); };
        Sinogram g(spec, angles);
        for (int i = 0; i < spec.n; ++i)
            for (int k = 0; k < angles.count; ++k) g(i, k) = std::cos(omega * spec.coord(i)) * window(spec.coord(i));
        const Sinogram hg = hilbert_rows(g);
        for (int i = 0; i < spec.n; ++i) {
            const double s = spec.coord(i);
            if (std::abs(s) > 0.6) continue;
            for (int k = 0; k < angles.count; ++k) CHECK(std::abs(hg(i, k) - std::sin(omega * s) * window(s)) <= 1e-2);
        }
    }
    SUBCASE("norm does not grow") {
        const Sinogram g = radon(SmoothBumps(51).field(spec), AngleSet(8));
        const Sinogram hg = hilbert_rows(g);
        for (int k = 0; k < g.n_theta(); ++k) {
            double n0 = 0.0, n1 = 0.0;
            for (int i = 0; i < spec.n; ++i) {
                n0 += g(i, k) * g(i, k);
                n1 += hg(i, k) * hg(i, k);
            }
            CHECK(std::sqrt(n1) <= (1.0 + 1e-6) * std::sqrt(n0));
        }
    }
    SUBCASE("linear and translation covariant") {
        const GridSpec small(128);
        const AngleSet one(1);
        Sinogram g(small, one), shifted(small, one), other(small, one);
        const int shift = 7;
        for (int i = 0; i < small.n; ++i) {
            const double s = small.coord(i);
            g(i, 0) = std::exp(-s * s / 0.02);
            shifted(i, 0) = std::exp(-(s - shift * small.spacing()) * (s - shift * small.spacing()) / 0.02);
            other(i, 0) = s * std::exp(-s * s / 0.05);
        }
        const Sinogram hg = hilbert_rows(g);
        const Sinogram hs = hilbert_rows(shifted);
        for (int i = 0; i + shift < small.n; ++i) CHECK(std::abs(hs(i + shift, 0) - hg(i, 0)) <= 5e-3);
        const Sinogram lin = hilbert_rows(g * 3.0 + other);
        const Sinogram sep = hilbert_rows(g) * 3.0 + hilbert_rows(other);
        CHECK(max_abs_diff(lin.values(), sep.values()) <= 1e-13);
    }
}

TEST_CASE("explicit inversion of the attenuated transform") {
    SUBCASE("zero data") {
        const GridSpec spec(64);
        const AngleSet angles(64);
        const ScalarField a = SmoothBumps(61, 3, 0.3, false).field(spec, 0.3);
        CHECK(is_zero(novikov_inverse(a, Sinogram(spec, angles))));
    }
    SUBCASE("linear in the data") {
        const GridSpec spec(64);
        const AngleSet angles(64);
        const ScalarField a = SmoothBumps(62, 3, 0.3, false).field(spec, 0.3);
        const NovikovCache cache(a, angles);
        const Sinogram j1 = attenuated_radon(a, SmoothBumps(63).field(spec), angles);
        const Sinogram j2 = attenuated_radon(a, SmoothBumps(64).field(spec), angles);
        const ScalarField lhs = novikov_inverse(cache, j1 * 2.0 + j2);
        const ScalarField rhs = novikov_inverse(cache, j1) * 2.0 + novikov_inverse(cache, j2);
        CHECK(max_abs_diff(lhs.values(), rhs.values()) <= 1e-12 * max_abs(rhs));
    }
    SUBCASE("cache rejects a different layout") {
        const GridSpec spec(64);
        const NovikovCache cache(ScalarField(spec), AngleSet(32));
        CHECK_THROWS_AS(cache.invert(Sinogram(spec, AngleSet(16))), GridMismatch);
    }
    SUBCASE("unattenuated round trip") {
        const GridSpec spec(256);
        const AngleSet angles(256);
        const ScalarField f = SmoothBumps(65, 4, 0.35, false).field(spec);
        const ScalarField rec = novikov_inverse(ScalarField(spec), radon(f, angles));
        CHECK(rel_l2_disc(rec, f) <= 0.02);
    }
    SUBCASE("attenuated round trip") {
        const GridSpec spec(256);
        const AngleSet angles(256);
        ScalarField a = SmoothBumps(66, 3, 0.3, false).field(spec);
        a *= 0.5 / max_abs(a);
        const ScalarField f = SmoothBumps(67, 4, 0.35, false).field(spec);
        const ScalarField rec = novikov_inverse(a, attenuated_radon(a, f, angles));
        CHECK(rel_l2_disc(rec, f) <= 0.02);
    }
}
