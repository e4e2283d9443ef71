#include "spect/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace spect {

double NoiseSource::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double NoiseSource::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t NoiseSource::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean < 30.0) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = uniform();
        while (p > limit) {
            ++k;
            p *= uniform();
        }
        return k;
    }
    const double draw = std::round(mean + std::sqrt(mean) * normal());
    return draw > 0.0 ? static_cast<std::uint64_t>(draw) : 0;
}

std::size_t NoiseSource::index(std::size_t count) {
    const std::uint64_t n = count;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % n);
}

Sinogram instrument_noise(const Sinogram& s, double amplitude, std::uint64_t seed) {
    if (amplitude < 0.0) throw std::invalid_argument("instrument_noise: amplitude must be nonnegative");
    if (amplitude == 0.0) return s;
    NoiseSource rng(seed);
    Sinogram out = s;
    for (double& v : out.values()) v = amplitude * static_cast<double>(rng.poisson(std::max(v, 0.0) / amplitude));
    return out;
}

Sinogram background_noise(const Sinogram& s, double bias, double quantum, std::uint64_t seed) {
    if (bias < 0.0) throw std::invalid_argument("background_noise: bias must be nonnegative");
    if (!(quantum > 0.0)) throw std::invalid_argument("background_noise: quantum must be positive");
    if (bias == 0.0) return s;
    double total = 0.0;
    for (double v : s.values()) total += v;
    const double measured = std::round(total / quantum);
    const auto added = static_cast<std::uint64_t>(std::max(0.0, std::round(bias * measured)));
    NoiseSource rng(seed);
    Sinogram out = s;
    auto values = out.values();
    for (std::uint64_t i = 0; i < added; ++i) values[rng.index(values.size())] += quantum;
    return out;
}

Sinogram apply_noise(const Sinogram& s, const NoiseParams& params) {
    const Sinogram noisy = instrument_noise(s, params.amplitude, params.seed);
    return background_noise(noisy, params.bias, params.quantum, params.seed ^ 0x9e3779b97f4a7c15ULL);
}

double default_quantum(const Sinogram& s) {
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : s.values()) {
        if (v > 0.0) {
            sum += v;
            ++count;
        }
    }
    return count > 0 ? sum / count / 50.0 : 1.0;
}

}  // namespace spect
