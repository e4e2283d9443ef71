#include "spect/recon.hpp"

#include <algorithm>
#include <cmath>

namespace spect {

void ReconConfig::validate() const {
    if (iters < 0) throw std::invalid_argument("ReconConfig: iters must be nonnegative");
    if (neumann_terms < 1) throw std::invalid_argument("ReconConfig: neumann_terms must be at least 1");
    if (!(mollifier_width_cells >= 0.0)) throw std::invalid_argument("ReconConfig: mollifier width must be >= 0");
    if (!(c_scatter > 0.0)) throw std::invalid_argument("ReconConfig: c_scatter must be positive");
    if (angles.count < 1) throw std::invalid_argument("ReconConfig: angle set is empty");
}

ScalarField mollify(const ScalarField& g, double eps_cells) {
    if (eps_cells < 0.0) throw std::invalid_argument("mollify: width must be nonnegative");
    if (eps_cells == 0.0) return g;
    const int r = static_cast<int>(std::ceil(eps_cells));
    const int width = 2 * r + 1;
    std::vector<double> kernel(static_cast<std::size_t>(width) * width, 0.0);
    double mass = 0.0;
    for (int di = -r; di <= r; ++di) {
        for (int dj = -r; dj <= r; ++dj) {
            const double q = (di * di + dj * dj) / (eps_cells * eps_cells);
            if (q < 1.0) {
                const double w = (1.0 - q) * (1.0 - q);
                kernel[static_cast<std::size_t>(di + r) * width + (dj + r)] = w;
                mass += w;
            }
        }
    }
    for (double& w : kernel) w /= mass;

    const int n = g.n();
    ScalarField out(g.spec());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double* dst = out.row(i);
        for (int di = -r; di <= r; ++di) {
            const int si = i - di;
            if (si < 0 || si >= n) continue;
            const double* src = g.row(si);
            const double* krow = &kernel[static_cast<std::size_t>(di + r) * width];
            for (int dj = -r; dj <= r; ++dj) {
                const double w = krow[dj + r];
                if (w == 0.0) continue;
                const int j0 = std::max(0, dj);
                const int j1 = std::min(n, n + dj);
                for (int j = j0; j < j1; ++j) dst[j] += w * src[j - dj];
            }
        }
    }
    return out;
}

CoeffPair initial_guess(const GridSpec& spec) { return CoeffPair(ScalarField(spec), disc_mask(spec, 1.0)); }

double rms_error(const ScalarField& rec, const ScalarField& truth) {
    require_same_grid(rec, truth, "rms_error");
    const GridSpec& spec = truth.spec();
    double diff = 0.0;
    double ref = 0.0;
    for (int i = 0; i < spec.n; ++i) {
        const double y = spec.coord(i);
        for (int j = 0; j < spec.n; ++j) {
            const double x = spec.coord(j);
            if (x * x + y * y >= 1.0) continue;
            const double d = rec(i, j) - truth(i, j);
            diff += d * d;
            ref += truth(i, j) * truth(i, j);
        }
    }
    if (!(ref > 0.0)) throw ZeroReference("rms_error: reference vanishes on the unit disc");
    return 100.0 * std::sqrt(diff / ref);
}

namespace {

void check_layout(const MeasurementPair& data, const ReconConfig& cfg) {
    const Sinogram layout(cfg.grid, cfg.angles);
    require_same_layout(data.a0, layout, "reconstruct (ballistic data)");
    require_same_layout(data.a1, layout, "reconstruct (scatter data)");
    if (data.c_scatter > 0.0 && std::abs(data.c_scatter - cfg.c_scatter) > 1e-12 * cfg.c_scatter)
        throw std::invalid_argument("reconstruct: data were simulated with a different scattering constant");
}

struct Residual {
    Sinogram r0;
    Sinogram r1;
};

Residual residual_at(const LinearizationPoint& point, const MeasurementPair& data, const ReconConfig& cfg) {
    Residual r{point.simulated().a0 - data.a0, point.simulated().a1 - data.a1};
    if (cfg.use_scatter_data)
        r.r1 *= 1.0 / cfg.c_scatter;
    else
        r.r1 = Sinogram(cfg.grid, cfg.angles);
    return r;
}

CoeffPair mollified(const CoeffPair& pair, double eps) {
    return CoeffPair(mollify(pair.a, eps), mollify(pair.f, eps));
}

}  // namespace

StepResult newton_step(CoeffPair& pair, const MeasurementPair& data, const ReconConfig& cfg) {
    cfg.validate();
    check_layout(data, cfg);
    const LinearizationPoint point(mollified(pair, cfg.mollifier_width_cells), cfg.angles, cfg.c_scatter,
                                   cfg.m_floor_rel);
    const Residual r = residual_at(point, data, cfg);
    StepResult out;
    out.residual0 = l2_norm(r.r0);
    out.residual1 = l2_norm(r.r1);
    const ScalarField g = precondition(point, r.r0);
    const ScalarField h = precondition(point, r.r1);
    out.update = apply_LQ_inverse(point, g, h, cfg.neumann_terms);
    pair.a -= out.update.sum.da * cfg.damping;
    pair.f -= out.update.sum.df * cfg.damping;
    if (cfg.project_nonneg) {
        pair.a = clamp_nonneg(pair.a);
        pair.f = clamp_nonneg(pair.f);
    }
    return out;
}

std::pair<double, double> residual_norms(const CoeffPair& pair, const MeasurementPair& data, const ReconConfig& cfg) {
    check_layout(data, cfg);
    const CoeffPair smooth = mollified(pair, cfg.mollifier_width_cells);
    MeasurementPair sim = albedo(smooth, cfg.angles, cfg.c_scatter);
    Sinogram r0 = sim.a0 - data.a0;
    Sinogram r1 = cfg.use_scatter_data ? (sim.a1 - data.a1) * (1.0 / cfg.c_scatter) : Sinogram(cfg.grid, cfg.angles);
    return {l2_norm(r0), l2_norm(r1)};
}

ReconState reconstruct(const MeasurementPair& data, const ReconConfig& cfg, const std::optional<CoeffPair>& truth,
                       const std::function<void(const IterationRecord&)>& on_record) {
    cfg.validate();
    check_layout(data, cfg);
    ReconState state{initial_guess(cfg.grid), {}};

    auto record_errors = [&](IterationRecord& rec) {
        if (!truth) return;
        rec.rms_a = rms_error(state.iterate.a, truth->a);
        rec.rms_f = rms_error(state.iterate.f, truth->f);
    };
    auto publish = [&](IterationRecord rec) {
        state.history.push_back(std::move(rec));
        if (on_record) on_record(state.history.back());
    };

    IterationRecord pending;
    pending.iteration = 0;
    record_errors(pending);
    for (int it = 0; it < cfg.iters; ++it) {
        const StepResult step = newton_step(state.iterate, data, cfg);
        pending.residual0 = step.residual0;
        pending.residual1 = step.residual1;
        publish(pending);

        pending = IterationRecord{};
        pending.iteration = it + 1;
        pending.neumann_ratios = step.update.ratios;
        pending.divergent = step.update.divergent;
        record_errors(pending);
    }
    const auto [r0, r1] = residual_norms(state.iterate, data, cfg);
    pending.residual0 = r0;
    pending.residual1 = r1;
    publish(pending);
    return state;
}

}  // namespace spect
