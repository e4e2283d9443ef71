#pragma once

// Measurement noise: amplitude-quantized Poisson instrument noise followed by
// uniformly placed background photons.
//
// Random numbers come from std::mt19937_64 (fully specified by the standard).
// Uniform doubles use the top 53 bits; Poisson draws use Knuth's product
// method below mean 30 and a rounded Box-Muller normal approximation above;
// pixel indices are drawn by rejection. No std distribution is used, so runs
// reproduce across standard libraries.

#include <cstdint>
#include <random>

#include "spect/grid.hpp"

namespace spect {

struct NoiseParams {
    double amplitude = 0.0;  // A
    double bias = 0.0;       // B
    double quantum = 1.0;    // q
    std::uint64_t seed = 0;
};

class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}

    double uniform();
    std::uint64_t poisson(double mean);
    std::size_t index(std::size_t count);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
    double normal();
};

/// Each pixel p becomes A * Poisson(max(p, 0) / A); A = 0 is the identity.
Sinogram instrument_noise(const Sinogram& s, double amplitude, std::uint64_t seed);

/// Adds q to round(B * round(sum s / q)) pixels drawn uniformly with
/// replacement; B = 0 is the identity.
Sinogram background_noise(const Sinogram& s, double bias, double quantum, std::uint64_t seed);

/// Instrument noise with `seed`, then background noise with a derived seed.
Sinogram apply_noise(const Sinogram& s, const NoiseParams& params);

/// Mean of the positive pixels divided by 50 (1 if there are none).
double default_quantum(const Sinogram& s);

}  // namespace spect
