#include "spect/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

namespace spect {

std::vector<double> row_totals(const ScalarField& frame) {
    const int n = frame.n();
    const double h = frame.spec().spacing();
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const double* r = frame.row(i);
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += r[j];
        out[i] = h * s;
    }
    return out;
}

std::vector<double> row_totals(const ScalarField& frame, const ScalarField& weight) {
    const int n = frame.n();
    const double h = frame.spec().spacing();
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const double* r = frame.row(i);
        const double* w = weight.row(i);
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += r[j] * w[j];
        out[i] = h * s;
    }
    return out;
}

ScalarField attenuation_factors(const ScalarField& a_frame) {
    ScalarField b(a_frame.spec());
    cumsum_backward_rows(a_frame, b);
    for (double& v : b.values()) v = std::exp(-v);
    return b;
}

Sinogram perp_reparam(const Sinogram& g) {
    const int n = g.n_s();
    const int count = g.n_theta();
    Sinogram out(g.spec(), g.angles());
    for (int k = 0; k < count; ++k) {
        const double target = k + 0.25 * count;
        const int k0 = static_cast<int>(std::floor(target));
        const double t = target - k0;
        const int ka = k0 % count;
        const int kb = (k0 + 1) % count;
        for (int i = 0; i < n; ++i) {
            const int mirrored = n - 1 - i;
            double v = g(mirrored, ka);
            if (t != 0.0) v = (1.0 - t) * v + t * g(mirrored, kb);
            out(i, k) = v;
        }
    }
    return out;
}

ScalarField beam_transform(const ScalarField& a, double theta) {
    return directed_cumsum(a, theta, RayMode::to_plus_infinity);
}

Sinogram radon(const ScalarField& f, const AngleSet& angles) {
    Sinogram out(f.spec(), angles);
    for (int k = 0; k < angles.count; ++k) out.set_column(k, row_totals(to_frame(f, angles.angle(k))));
    return out;
}

Sinogram attenuated_radon(const ScalarField& a, const ScalarField& f, const AngleSet& angles) {
    require_same_grid(a, f, "attenuated_radon");
    Sinogram out(f.spec(), angles);
    for (int k = 0; k < angles.count; ++k) {
        const double theta = angles.angle(k);
        const ScalarField weight = attenuation_factors(to_frame(a, theta));
        out.set_column(k, row_totals(to_frame(f, theta), weight));
    }
    return out;
}

DirectionalWeight::DirectionalWeight(GridSpec spec, AngleSet angles, std::vector<ScalarField> frames)
    : spec_(spec), angles_(angles), frames_(std::move(frames)) {
    if (static_cast<int>(frames_.size()) != angles_.count)
        throw std::invalid_argument("DirectionalWeight: one frame per angle required");
    for (const auto& f : frames_)
        if (!(f.spec() == spec_)) throw GridMismatch("DirectionalWeight: frame grid differs");
}

DirectionalWeight DirectionalWeight::from_function(GridSpec spec, AngleSet angles,
                                                   const std::function<double(double, double, double)>& fn) {
    std::vector<ScalarField> frames;
    frames.reserve(angles.count);
    for (int k = 0; k < angles.count; ++k) {
        const double theta = angles.angle(k);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        frames.push_back(ScalarField::sample(spec, [&](double u, double v) {
            return fn(c * u - s * v, s * u + c * v, theta);
        }));
    }
    return DirectionalWeight(spec, angles, std::move(frames));
}

DirectionalWeight DirectionalWeight::beam_attenuation(const ScalarField& a, const AngleSet& angles) {
    std::vector<ScalarField> frames;
    frames.reserve(angles.count);
    for (int k = 0; k < angles.count; ++k) frames.push_back(attenuation_factors(to_frame(a, angles.angle(k))));
    return DirectionalWeight(a.spec(), angles, std::move(frames));
}

Sinogram weighted_radon(const DirectionalWeight& w, const ScalarField& f) {
    if (!(w.spec() == f.spec())) throw GridMismatch("weighted_radon: weight and field grids differ");
    Sinogram out(f.spec(), w.angles());
    for (int k = 0; k < w.angles().count; ++k)
        out.set_column(k, row_totals(to_frame(f, w.angles().angle(k)), w.frame(k)));
    return out;
}

// ---------------------------------------------------------------------------

HilbertTransformer::HilbertTransformer(int length) : length_(length), kernel_hat_(length) {
    buffer_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * length));
    auto* buf = reinterpret_cast<fftw_complex*>(buffer_);
    forward_ = fftw_plan_dft_1d(length, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(length, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    // Discrete kernel 2 / (pi m) on odd offsets |m| < length / 2.
    std::fill(buffer_, buffer_ + length, 0.0);
    for (int m = 1; 2 * m < length; m += 2) {
        buffer_[m] = 2.0 / (std::numbers::pi * m);
        buffer_[length - m] = -2.0 / (std::numbers::pi * m);
    }
    fftw_execute(static_cast<fftw_plan>(forward_));
    for (int q = 0; q < length; ++q) kernel_hat_[q] = buffer_[q] / static_cast<double>(length);
}

HilbertTransformer::~HilbertTransformer() {
    fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_));
    fftw_free(buffer_);
}

void HilbertTransformer::apply(std::complex<double>* row) {
    std::copy(row, row + length_, buffer_);
    fftw_execute(static_cast<fftw_plan>(forward_));
    for (int q = 0; q < length_; ++q) buffer_[q] *= kernel_hat_[q];
    fftw_execute(static_cast<fftw_plan>(backward_));
    std::copy(buffer_, buffer_ + length_, row);
}

Sinogram hilbert_rows(const Sinogram& g, int pad_factor) {
    const int n = g.n_s();
    const int m = pad_factor * n;
    const int offset = (m - n) / 2;
    HilbertTransformer hilbert(m);
    std::vector<std::complex<double>> row(m);
    Sinogram out(g.spec(), g.angles());
    for (int k = 0; k < g.n_theta(); ++k) {
        std::fill(row.begin(), row.end(), 0.0);
        for (int i = 0; i < n; ++i) row[offset + i] = g(i, k);
        hilbert.apply(row.data());
        for (int i = 0; i < n; ++i) out(i, k) = row[offset + i].real();
    }
    return out;
}

// ---------------------------------------------------------------------------

NovikovCache::NovikovCache(const ScalarField& a, const AngleSet& angles, int pad_factor)
    : spec_(a.spec()), angles_(angles) {
    const int n = spec_.n;
    padded_ = pad_factor * n;
    offset_ = (padded_ - n) / 2;
    hilbert_ = std::make_unique<HilbertTransformer>(padded_);

    const Sinogram ra_perp = perp_reparam(radon(a, angles));
    exp_plus_.resize(static_cast<std::size_t>(angles.count) * padded_);
    exp_minus_.resize(exp_plus_.size());
    std::vector<std::complex<double>> row(padded_);
    for (int k = 0; k < angles.count; ++k) {
        std::fill(row.begin(), row.end(), 0.0);
        for (int i = 0; i < n; ++i) row[offset_ + i] = ra_perp(i, k);
        std::vector<double> real(padded_);
        for (int q = 0; q < padded_; ++q) real[q] = row[q].real();
        hilbert_->apply(row.data());
        for (int q = 0; q < padded_; ++q) {
            const std::complex<double> hq(0.5 * real[q], 0.5 * row[q].real());
            exp_plus_[static_cast<std::size_t>(k) * padded_ + q] = std::exp(hq);
            exp_minus_[static_cast<std::size_t>(k) * padded_ + q] = std::exp(-hq);
        }
    }

    beam_exp_.reserve(angles.count);
    ScalarField acc(spec_);
    for (int k = 0; k < angles.count; ++k) {
        const double perp = angles.angle(k) + 0.5 * std::numbers::pi;
        cumsum_backward_rows(to_frame(a, perp), acc);
        beam_exp_.push_back(exp_field(from_frame(acc, perp)));
    }
}

namespace {

// Sixth-order central difference; zero where the stencil leaves the row.
void derivative_6(const std::vector<double>& g, double h, std::vector<double>& out) {
    const int m = static_cast<int>(g.size());
    std::fill(out.begin(), out.end(), 0.0);
    for (int q = 3; q < m - 3; ++q)
        out[q] = (45.0 * (g[q + 1] - g[q - 1]) - 9.0 * (g[q + 2] - g[q - 2]) + (g[q + 3] - g[q - 3])) / (60.0 * h);
}

}  // namespace

ScalarField NovikovCache::invert(const Sinogram& J) const {
    if (!(J.spec() == spec_) || !(J.angles() == angles_))
        throw GridMismatch("novikov_inverse: data layout differs from the cached attenuation");
    const int n = spec_.n;
    const double h = spec_.spacing();
    const double dtheta = angles_.step();
    const double center = 0.5 * (n - 1);
    const Sinogram jp = perp_reparam(J);

    // Re div sum_k theta_k e_k(x) g_k(x . theta_k) / (4 pi), expanded as
    // e_k g_k' + (theta_k . grad e_k) g_k, with a sixth-order stencil for g_k'
    // and centred differences on the smooth factor e_k.
    ScalarField out(spec_);
    std::vector<std::complex<double>> row(padded_);
    std::vector<double> g(padded_), gp(padded_);
    const double scale = 1.0 / (4.0 * std::numbers::pi);
    const double last = padded_ - 1;
    for (int k = 0; k < angles_.count; ++k) {
        const std::size_t base = static_cast<std::size_t>(k) * padded_;
        std::fill(row.begin(), row.end(), 0.0);
        for (int i = 0; i < n; ++i) row[offset_ + i] = exp_plus_[base + offset_ + i] * jp(i, k);
        hilbert_->apply(row.data());
        for (int q = 0; q < padded_; ++q) g[q] = (exp_minus_[base + q] * row[q]).real();
        derivative_6(g, h, gp);

        const double theta = angles_.angle(k);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const ScalarField& e = beam_exp_[k];
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            const int iu = std::min(i + 1, n - 1), id = std::max(i - 1, 0);
            const double* er = e.row(i);
            const double* eu = e.row(iu);
            const double* ed = e.row(id);
            double* po = out.row(i);
            const double rowpart = s * (i - center) + center + offset_;
            for (int j = 0; j < n; ++j) {
                const double fi = c * (j - center) + rowpart;
                if (fi < 0.0 || fi > last) continue;
                const int q0 = std::min(static_cast<int>(fi), padded_ - 2);
                const double t = fi - q0;
                const int jr = std::min(j + 1, n - 1), jl = std::max(j - 1, 0);
                const double dx = (er[jr] - er[jl]) / ((jr - jl) * h);
                const double dy = (eu[j] - ed[j]) / ((iu - id) * h);
                const double gv = (1.0 - t) * g[q0] + t * g[q0 + 1];
                const double gpv = (1.0 - t) * gp[q0] + t * gp[q0 + 1];
                po[j] += dtheta * scale * (er[j] * gpv + (c * dx + s * dy) * gv);
            }
        }
    }
    return out;
}

ScalarField novikov_inverse(const NovikovCache& cache, const Sinogram& J) { return cache.invert(J); }

ScalarField novikov_inverse(const ScalarField& a, const Sinogram& J, int pad_factor) {
    return NovikovCache(a, J.angles(), pad_factor).invert(J);
}

}  // namespace spect
