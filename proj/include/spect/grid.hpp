#pragma once

// Cartesian sample containers and the two kernels every transform is built
// from: bilinear rotation about the origin and directed cumulative line
// integrals along a direction.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spect {

class GridMismatch : public std::invalid_argument {
public:
    explicit GridMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// Cell-centered n x n sampling of the square [-L, L]^2.
/// Sample i sits at -L + (i + 1/2) h with h = 2L / n.
struct GridSpec {
    int n = 0;
    double half_width = 1.0;

    GridSpec() = default;
    GridSpec(int n_, double half_width_ = 1.0);

    double spacing() const { return 2.0 * half_width / n; }
    double coord(int i) const { return -half_width + (i + 0.5) * spacing(); }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }

    bool operator==(const GridSpec& o) const { return n == o.n && half_width == o.half_width; }
};

/// Uniform discretization of the circle: theta_k = 2 pi k / count.
struct AngleSet {
    int count = 0;

    AngleSet() = default;
    explicit AngleSet(int count_);

    double step() const { return 2.0 * std::numbers::pi / count; }
    double angle(int k) const { return step() * k; }

    bool operator==(const AngleSet& o) const { return count == o.count; }
};

/// Samples of a function on the grid, row-major with row = y, column = x.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridSpec spec, double fill = 0.0);
    ScalarField(GridSpec spec, std::vector<double> values);

    const GridSpec& spec() const { return spec_; }
    int n() const { return spec_.n; }

    double& operator()(int row, int col) { return values_[static_cast<std::size_t>(row) * spec_.n + col]; }
    double operator()(int row, int col) const { return values_[static_cast<std::size_t>(row) * spec_.n + col]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double* row(int r) { return values_.data() + static_cast<std::size_t>(r) * spec_.n; }
    const double* row(int r) const { return values_.data() + static_cast<std::size_t>(r) * spec_.n; }

    /// Fill from a function of physical coordinates (x, y).
    template <class F>
    static ScalarField sample(GridSpec spec, F&& fn) {
        ScalarField out(spec);
        for (int i = 0; i < spec.n; ++i) {
            const double y = spec.coord(i);
            for (int j = 0; j < spec.n; ++j) out(i, j) = fn(spec.coord(j), y);
        }
        return out;
    }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);

private:
    GridSpec spec_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, double s);
ScalarField operator*(double s, ScalarField a);

/// Samples over (s, theta): n_s = grid.n cell-centered offsets on [-L, L]
/// by angles.count directions. Stored s-major: index = i_s * n_theta + k.
class Sinogram {
public:
    Sinogram() = default;
    Sinogram(GridSpec spec, AngleSet angles, double fill = 0.0);
    Sinogram(GridSpec spec, AngleSet angles, std::vector<double> values);

    const GridSpec& spec() const { return spec_; }
    const AngleSet& angles() const { return angles_; }
    int n_s() const { return spec_.n; }
    int n_theta() const { return angles_.count; }

    double& operator()(int i_s, int k) { return values_[static_cast<std::size_t>(i_s) * angles_.count + k]; }
    double operator()(int i_s, int k) const { return values_[static_cast<std::size_t>(i_s) * angles_.count + k]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    std::vector<double> column(int k) const;
    void set_column(int k, std::span<const double> col);

    Sinogram& operator+=(const Sinogram& o);
    Sinogram& operator-=(const Sinogram& o);
    Sinogram& operator*=(double s);

private:
    GridSpec spec_;
    AngleSet angles_;
    std::vector<double> values_;
};

Sinogram operator+(Sinogram a, const Sinogram& b);
Sinogram operator-(Sinogram a, const Sinogram& b);
Sinogram operator*(Sinogram a, double s);
Sinogram operator*(double s, Sinogram a);

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where);
void require_same_layout(const Sinogram& a, const Sinogram& b, const char* where);

// Pointwise arithmetic.

template <class F>
ScalarField field_map(const ScalarField& g, F&& fn) {
    ScalarField out(g.spec());
    auto src = g.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = fn(src[i]);
    return out;
}

template <class F>
ScalarField field_zip(const ScalarField& a, const ScalarField& b, F&& fn) {
    require_same_grid(a, b, "field_zip");
    ScalarField out(a.spec());
    auto x = a.values();
    auto y = b.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < x.size(); ++i) dst[i] = fn(x[i], y[i]);
    return out;
}

ScalarField multiply(const ScalarField& a, const ScalarField& b);
ScalarField exp_field(const ScalarField& g);
ScalarField clamp_nonneg(const ScalarField& g);

/// Discrete L2 norm with the cell area as measure.
double l2_norm(const ScalarField& g);
double l1_norm(const ScalarField& g);
double max_abs(const ScalarField& g);
double l2_norm(const Sinogram& g);
bool all_finite(std::span<const double> v);

/// Indicator of the open disc |x| < radius, sampled at cell centers.
ScalarField disc_mask(GridSpec spec, double radius = 1.0);

/// rotate_field(g, phi)(x) = g(R_{-phi} x): the content turns by +phi about the
/// origin. Bilinear interpolation; samples beyond the grid and points outside
/// [-L, L]^2 read as zero.
ScalarField rotate_field(const ScalarField& g, double phi);

/// Ray-aligned frame for direction theta: frame(y) = g(R_theta y), so row i
/// holds the line s_i theta_perp + t theta with t increasing along the row.
inline ScalarField to_frame(const ScalarField& g, double theta) { return rotate_field(g, -theta); }
inline ScalarField from_frame(const ScalarField& g, double theta) { return rotate_field(g, theta); }

/// Row-wise trapezoid half-line integrals in a frame, values beyond the grid
/// taken as zero:
///   forward:  out[j] = h (sum_{k<j} g[k] + g[j]/2)   (integral from -infinity)
///   backward: out[j] = h (g[j]/2 + sum_{k>j} g[k])   (integral to +infinity)
/// forward + backward equals the row total h * sum g.
void cumsum_forward_rows(const ScalarField& g, ScalarField& out);
void cumsum_backward_rows(const ScalarField& g, ScalarField& out);

enum class RayMode { from_minus_infinity, to_plus_infinity };

/// to_plus_infinity:     G(x) = int_0^inf g(x + t theta) dt
/// from_minus_infinity:  G(x) = int_0^inf g(x - t theta) dt
ScalarField directed_cumsum(const ScalarField& g, double theta, RayMode mode);

}  // namespace spect
