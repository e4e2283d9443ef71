#include "spect/grid.hpp"

#include <algorithm>
#include <cmath>

namespace spect {

GridSpec::GridSpec(int n_, double half_width_) : n(n_), half_width(half_width_) {
    if (n_ < 8) throw std::invalid_argument("GridSpec: n must be at least 8");
    if (!(half_width_ > 0.0)) throw std::invalid_argument("GridSpec: half_width must be positive");
}

AngleSet::AngleSet(int count_) : count(count_) {
    if (count_ < 1) throw std::invalid_argument("AngleSet: count must be positive");
}

ScalarField::ScalarField(GridSpec spec, double fill) : spec_(spec), values_(spec.size(), fill) {}

ScalarField::ScalarField(GridSpec spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.size()) throw std::invalid_argument("ScalarField: value count does not match grid");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_grid(*this, o, "ScalarField::operator+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_grid(*this, o, "ScalarField::operator-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

Sinogram::Sinogram(GridSpec spec, AngleSet angles, double fill)
    : spec_(spec), angles_(angles), values_(static_cast<std::size_t>(spec.n) * angles.count, fill) {}

Sinogram::Sinogram(GridSpec spec, AngleSet angles, std::vector<double> values)
    : spec_(spec), angles_(angles), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(spec_.n) * angles_.count)
        throw std::invalid_argument("Sinogram: value count does not match layout");
}

std::vector<double> Sinogram::column(int k) const {
    std::vector<double> col(spec_.n);
    for (int i = 0; i < spec_.n; ++i) col[i] = (*this)(i, k);
    return col;
}

void Sinogram::set_column(int k, std::span<const double> col) {
    for (int i = 0; i < spec_.n; ++i) (*this)(i, k) = col[i];
}

Sinogram& Sinogram::operator+=(const Sinogram& o) {
    require_same_layout(*this, o, "Sinogram::operator+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

Sinogram& Sinogram::operator-=(const Sinogram& o) {
    require_same_layout(*this, o, "Sinogram::operator-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

Sinogram& Sinogram::operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
}

Sinogram operator+(Sinogram a, const Sinogram& b) { return a += b; }
Sinogram operator-(Sinogram a, const Sinogram& b) { return a -= b; }
Sinogram operator*(Sinogram a, double s) { return a *= s; }
Sinogram operator*(double s, Sinogram a) { return a *= s; }

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where) {
    if (!(a.spec() == b.spec())) throw GridMismatch(std::string(where) + ": fields live on different grids");
}

void require_same_layout(const Sinogram& a, const Sinogram& b, const char* where) {
    if (!(a.spec() == b.spec()) || !(a.angles() == b.angles()))
        throw GridMismatch(std::string(where) + ": sinograms have different layouts");
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    return field_zip(a, b, [](double x, double y) { return x * y; });
}

ScalarField exp_field(const ScalarField& g) {
    return field_map(g, [](double x) { return std::exp(x); });
}

ScalarField clamp_nonneg(const ScalarField& g) {
    return field_map(g, [](double x) { return std::max(x, 0.0); });
}

double l2_norm(const ScalarField& g) {
    double s = 0.0;
    for (double v : g.values()) s += v * v;
    return std::sqrt(s) * g.spec().spacing();
}

double l1_norm(const ScalarField& g) {
    double s = 0.0;
    for (double v : g.values()) s += std::abs(v);
    const double h = g.spec().spacing();
    return s * h * h;
}

double max_abs(const ScalarField& g) {
    double m = 0.0;
    for (double v : g.values()) m = std::max(m, std::abs(v));
    return m;
}

double l2_norm(const Sinogram& g) {
    double s = 0.0;
    for (double v : g.values()) s += v * v;
    return std::sqrt(s * g.spec().spacing() * g.angles().step());
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

ScalarField disc_mask(GridSpec spec, double radius) {
    return ScalarField::sample(spec, [r2 = radius * radius](double x, double y) {
        return x * x + y * y < r2 ? 1.0 : 0.0;
    });
}

ScalarField rotate_field(const ScalarField& g, double phi) {
    const int n = g.n();
    ScalarField out(g.spec());
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double center = 0.5 * (n - 1);
    const double edge = 0.5 * n;
    const double* src = g.values().data();

    auto fetch = [&](int i, int j) -> double {
        if (i < 0 || i >= n || j < 0 || j >= n) return 0.0;
        return src[static_cast<std::size_t>(i) * n + j];
    };

    // Work in index units centered on the origin so that phi = 0 (and the
    // lattice-preserving quarter turns) reproduce samples exactly.
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double v = i - center;
        double* dst = out.row(i);
        for (int j = 0; j < n; ++j) {
            const double u = j - center;
            const double pu = c * u + s * v;
            const double pv = -s * u + c * v;
            if (std::abs(pu) > edge || std::abs(pv) > edge) {
                dst[j] = 0.0;
                continue;
            }
            const double jf = pu + center;
            const double iff = pv + center;
            const int j0 = static_cast<int>(std::floor(jf));
            const int i0 = static_cast<int>(std::floor(iff));
            const double tx = jf - j0;
            const double ty = iff - i0;
            if (i0 >= 0 && i0 < n - 1 && j0 >= 0 && j0 < n - 1) {
                const double* r0 = src + static_cast<std::size_t>(i0) * n + j0;
                const double* r1 = r0 + n;
                dst[j] = (1 - ty) * ((1 - tx) * r0[0] + tx * r0[1]) + ty * ((1 - tx) * r1[0] + tx * r1[1]);
            } else {
                dst[j] = (1 - ty) * ((1 - tx) * fetch(i0, j0) + tx * fetch(i0, j0 + 1)) +
                         ty * ((1 - tx) * fetch(i0 + 1, j0) + tx * fetch(i0 + 1, j0 + 1));
            }
        }
    }
    return out;
}

void cumsum_forward_rows(const ScalarField& g, ScalarField& out) {
    const int n = g.n();
    const double h = g.spec().spacing();
    if (!(out.spec() == g.spec())) out = ScalarField(g.spec());
    for (int i = 0; i < n; ++i) {
        const double* src = g.row(i);
        double* dst = out.row(i);
        double run = 0.0;
        for (int j = 0; j < n; ++j) {
            dst[j] = h * (run + 0.5 * src[j]);
            run += src[j];
        }
    }
}

void cumsum_backward_rows(const ScalarField& g, ScalarField& out) {
    const int n = g.n();
    const double h = g.spec().spacing();
    if (!(out.spec() == g.spec())) out = ScalarField(g.spec());
    for (int i = 0; i < n; ++i) {
        const double* src = g.row(i);
        double* dst = out.row(i);
        double run = 0.0;
        for (int j = n - 1; j >= 0; --j) {
            dst[j] = h * (run + 0.5 * src[j]);
            run += src[j];
        }
    }
}

ScalarField directed_cumsum(const ScalarField& g, double theta, RayMode mode) {
    const ScalarField frame = to_frame(g, theta);
    ScalarField acc(g.spec());
    if (mode == RayMode::to_plus_infinity)
        cumsum_backward_rows(frame, acc);
    else
        cumsum_forward_rows(frame, acc);
    return from_frame(acc, theta);
}

}  // namespace spect
