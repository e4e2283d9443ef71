#include "doctest.h"
#include "spect/noise.hpp"
#include "support.hpp"

#include <numeric>

using namespace spect;
using namespace spect::testing;

namespace {

Sinogram constant_sinogram(int n_s, int n_theta, double value) {
    Sinogram s{GridSpec(n_s), AngleSet(n_theta)};
    for (double& v : s.values()) v = value;
    return s;
}

double sum(const Sinogram& s) { return std::accumulate(s.values().begin(), s.values().end(), 0.0); }

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments(std::span<const double> v) {
    Moments m;
    for (double x : v) m.mean += x;
    m.mean /= v.size();
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= v.size() - 1;
    return m;
}

}  // namespace

TEST_CASE("uniform draws") {
    NoiseSource rng(7);
    std::vector<double> u(100000);
    for (double& x : u) x = rng.uniform();
    const Moments m = moments(u);
    CHECK(*std::min_element(u.begin(), u.end()) >= 0.0);
    CHECK(*std::max_element(u.begin(), u.end()) < 1.0);
    CHECK(std::abs(m.mean - 0.5) <= 4.0 * std::sqrt(1.0 / 12.0 / u.size()));
    CHECK(m.var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("poisson draws match their moments") {
    for (double mean : {0.3, 4.0, 29.0, 31.0, 400.0}) {
        CAPTURE(mean);
        NoiseSource rng(11);
        std::vector<double> k(40000);
        for (double& x : k) x = static_cast<double>(rng.poisson(mean));
        const Moments m = moments(k);
        CHECK(std::abs(m.mean - mean) <= 4.0 * std::sqrt(mean / k.size()));
        // Variance of the sample variance for a Poisson law is about (mean + 2 mean^2) / N.
        CHECK(std::abs(m.var - mean) <= 4.0 * std::sqrt((mean + 2.0 * mean * mean) / k.size()));
    }
    NoiseSource rng(3);
    CHECK(rng.poisson(0.0) == 0);
    CHECK(rng.poisson(-1.0) == 0);
}

TEST_CASE("index draws are uniform") {
    NoiseSource rng(5);
    const std::size_t bins = 7, draws = 70000;
    std::vector<int> count(bins, 0);
    for (std::size_t i = 0; i < draws; ++i) ++count[rng.index(bins)];
    const double expect = double(draws) / bins, sigma = std::sqrt(expect * (1.0 - 1.0 / bins));
    for (int c : count) CHECK(std::abs(c - expect) <= 4.0 * sigma);
}

TEST_CASE("instrument noise") {
    SUBCASE("zero amplitude passes through") {
        const Sinogram s = constant_sinogram(16, 8, 0.7);
        CHECK(bit_equal(instrument_noise(s, 0.0, 1).values(), s.values()));
    }
    SUBCASE("zero pixels stay zero and negatives are clamped") {
        Sinogram s = constant_sinogram(16, 8, 0.0);
        s(3, 2) = -5.0;
        CHECK(is_zero(instrument_noise(s, 0.3, 1)));
    }
    SUBCASE("unbiased with variance A p") {
        const Sinogram s = constant_sinogram(100, 100, 1.0);
        const Sinogram out = instrument_noise(s, 0.2, 42);
        const Moments m = moments(out.values());
        CHECK(m.mean >= 0.99);
        CHECK(m.mean <= 1.01);
        CHECK(m.var >= 0.18);
        CHECK(m.var <= 0.22);
    }
    SUBCASE("large counts use the normal branch with the same moments") {
        const Sinogram s = constant_sinogram(100, 100, 10.0);
        const Moments m = moments(instrument_noise(s, 0.2, 43).values());
        CHECK(std::abs(m.mean - 10.0) <= 4.0 * std::sqrt(2.0 / 1e4));
        CHECK(m.var == doctest::Approx(2.0).epsilon(0.06));
    }
    SUBCASE("values are multiples of the amplitude") {
        const Sinogram out = instrument_noise(constant_sinogram(16, 16, 0.5), 0.25, 9);
        for (double v : out.values()) CHECK(std::abs(v / 0.25 - std::round(v / 0.25)) <= 1e-12);
    }
    SUBCASE("seeded") {
        const Sinogram s = constant_sinogram(32, 16, 2.0);
        CHECK(bit_equal(instrument_noise(s, 0.3, 5).values(), instrument_noise(s, 0.3, 5).values()));
        CHECK_FALSE(bit_equal(instrument_noise(s, 0.3, 5).values(), instrument_noise(s, 0.3, 6).values()));
    }
    CHECK_THROWS_AS(instrument_noise(constant_sinogram(8, 2, 1.0), -0.1, 1), std::invalid_argument);
}

TEST_CASE("background noise") {
    const Sinogram s = constant_sinogram(32, 32, 0.5);
    SUBCASE("zero bias passes through") { CHECK(bit_equal(background_noise(s, 0.0, 0.1, 1).values(), s.values())); }
    SUBCASE("mass bookkeeping") {
        const double q = 0.05, B = 0.5;
        const Sinogram out = background_noise(s, B, q, 2);
        const double n_add = std::round(B * std::round(sum(s) / q));
        CHECK(sum(out) == doctest::Approx(sum(s) + n_add * q).epsilon(1e-12));
        for (std::size_t i = 0; i < out.values().size(); ++i) {
            const double added = (out.values()[i] - s.values()[i]) / q;
            CHECK(added >= -1e-9);
            CHECK(std::abs(added - std::round(added)) <= 1e-9);
        }
    }
    SUBCASE("added mass is spread uniformly") {
        const double q = 0.05, B = 0.5;
        const double n_add = std::round(B * std::round(sum(s) / q));
        const std::size_t pixels = s.values().size();
        std::vector<double> per_pixel(pixels, 0.0);
        const int trials = 50;
        for (int t = 0; t < trials; ++t) {
            const Sinogram out = background_noise(s, B, q, 100 + t);
            for (std::size_t i = 0; i < pixels; ++i) per_pixel[i] += out.values()[i] - s.values()[i];
        }
        const double expect = B * sum(s) / pixels;
        // Each pixel receives Binomial(n_add, 1 / pixels) photons per trial.
        const double sigma = q * std::sqrt(n_add * (1.0 / pixels) * (1.0 - 1.0 / pixels) / trials);
        int outliers = 0;
        for (double v : per_pixel) outliers += std::abs(v / trials - expect) > 3.0 * sigma;
        CHECK(outliers <= static_cast<int>(0.01 * pixels));
        double mean = std::accumulate(per_pixel.begin(), per_pixel.end(), 0.0) / (pixels * trials);
        CHECK(mean == doctest::Approx(expect).epsilon(1e-3));
    }
    CHECK_THROWS_AS(background_noise(s, -1.0, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(background_noise(s, 1.0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("combined noise") {
    Sinogram s(GridSpec(64), AngleSet(32));
    for (int i = 0; i < s.n_s(); ++i)
        for (int k = 0; k < s.n_theta(); ++k) s(i, k) = std::max(0.0, 1.0 - std::abs(s.spec().coord(i)));
    const NoiseParams p{0.2, 0.5, default_quantum(s), 77};
    const Sinogram out = apply_noise(s, p);
    CHECK(bit_equal(out.values(), apply_noise(s, p).values()));
    CHECK(min_value(out) >= 0.0);
    CHECK(bit_equal(apply_noise(s, {0.0, 0.0, 1.0, 3}).values(), s.values()));
    // Both stages in sequence, the second with a seed derived from the first.
    const Sinogram staged = background_noise(instrument_noise(s, 0.2, 77), 0.5, p.quantum, 77 ^ 0x9e3779b97f4a7c15ULL);
    CHECK(bit_equal(out.values(), staged.values()));
    CHECK(std::abs(sum(out) - 1.5 * sum(s)) <= 0.6 * sum(s));
}

TEST_CASE("default quantum") {
    Sinogram s(GridSpec(16), AngleSet(4));
    CHECK(default_quantum(s) == 1.0);
    s(0, 0) = 2.0;
    s(1, 1) = 4.0;
    s(2, 2) = -1.0;
    CHECK(default_quantum(s) == doctest::Approx(3.0 / 50.0));
}
