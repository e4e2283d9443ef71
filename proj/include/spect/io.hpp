#pragma once

// File formats. Both carry one ASCII header line followed by raw 64-bit
// little-endian IEEE-754 values:
//   SPFLD <rows> <cols> <xmin> <xmax> <ymin> <ymax>\n   rows * cols, row-major
//   SPSIN <n_s> <n_theta> <smin> <smax>\n              n_s * n_theta, s-major
// PGM export writes 16-bit binary (P5) images with the min-max normalization
// recorded in a comment line.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "spect/grid.hpp"

namespace spect {

class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Shortest round-trip decimal text for a double.
std::string format_real(double v);

void write_field(const std::filesystem::path& path, const ScalarField& g);
ScalarField read_field(const std::filesystem::path& path);

void write_sinogram(const std::filesystem::path& path, const Sinogram& s);
Sinogram read_sinogram(const std::filesystem::path& path);

/// Row-major image with row 0 at the top.
struct Image {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;
};

/// y up: the last grid row becomes the top image row. With crop, only the
/// cells inside [-1, 1]^2 are kept.
Image field_image(const ScalarField& g, bool crop_unit_square = false);
/// theta horizontal, s vertical with s increasing upward.
Image sinogram_image(const Sinogram& s);

void write_pgm(const std::filesystem::path& path, const Image& image);

}  // namespace spect
