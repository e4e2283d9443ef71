#include "spect/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace spect {

double cutoff_profile(double s) {
    const double r = std::abs(s);
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * (r - 1.0));
    return c * c;
}

Cutoffs::Cutoffs(const GridSpec& spec)
    : phi(spec.n), chi(ScalarField::sample(spec, [](double x, double y) { return cutoff_profile(std::hypot(x, y)); })) {
    for (int i = 0; i < spec.n; ++i) phi[i] = cutoff_profile(spec.coord(i));
}

ScalarField weight_w(const ScalarField& u, const ScalarField& v, double theta) {
    require_same_grid(u, v, "weight_w");
    const ScalarField weighted = multiply(to_frame(v, theta), attenuation_factors(to_frame(u, theta)));
    ScalarField acc(u.spec());
    cumsum_forward_rows(weighted, acc);
    acc *= -1.0;
    return from_frame(acc, theta);
}

namespace {

std::vector<ScalarField> negated_incoming_integrals(const std::vector<ScalarField>& attenuation,
                                                    const ScalarField& v, const AngleSet& angles) {
    std::vector<ScalarField> out;
    out.reserve(angles.count);
    ScalarField acc(v.spec());
    for (int k = 0; k < angles.count; ++k) {
        cumsum_forward_rows(multiply(to_frame(v, angles.angle(k)), attenuation[k]), acc);
        acc *= -1.0;
        out.push_back(acc);
    }
    return out;
}

Sinogram frame_radon(const std::vector<ScalarField>& weights, const ScalarField& g, const AngleSet& angles) {
    Sinogram out(g.spec(), angles);
    for (int k = 0; k < angles.count; ++k) out.set_column(k, row_totals(to_frame(g, angles.angle(k)), weights[k]));
    return out;
}

}  // namespace

LinearizationPoint::LinearizationPoint(CoeffPair base, AngleSet angles, double c_scatter, double m_floor_rel,
                                       int pad_factor)
    : base_(std::move(base)),
      angles_(angles),
      c_scatter_(c_scatter),
      cutoffs_(base_.spec()),
      support_(disc_mask(base_.spec(), 1.0)),
      m_field_(base_.spec()),
      novikov_(base_.a, angles, pad_factor) {
    const GridSpec& spec = base_.spec();
    const int count = angles_.count;
    steps_.reserve(count);
    attenuation_.reserve(count);
    source_frames_.reserve(count);
    ballistic_.reserve(count);

    simulated_.c_scatter = c_scatter_;
    simulated_.a0 = Sinogram(spec, angles_);
    ScalarField u(spec);
    for (int k = 0; k < count; ++k) {
        const double theta = angles_.angle(k);
        const ScalarField a_frame = to_frame(base_.a, theta);
        steps_.push_back(step_factors(a_frame));
        attenuation_.push_back(attenuation_factors(a_frame));
        source_frames_.push_back(to_frame(base_.f, theta));
        incoming_sweep(steps_[k], source_frames_[k], u);
        m_field_ += from_frame(u, theta);
        ballistic_.push_back(u);
        simulated_.a0.set_column(k, row_totals(source_frames_[k], attenuation_[k]));
    }
    m_field_ *= angles_.step();

    const ScalarField am = multiply(base_.a, m_field_);
    simulated_.a1 = frame_radon(attenuation_, am, angles_) * c_scatter_;
    w_source_ = negated_incoming_integrals(attenuation_, base_.f, angles_);
    w_scatter_ = negated_incoming_integrals(attenuation_, am, angles_);

    double m_max = 0.0;
    m_min_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double m = m_field_.values()[i];
        m_max = std::max(m_max, m);
        if (support_.values()[i] > 0.0) m_min_ = std::min(m_min_, m);
    }
    m_floor_ = m_floor_rel * m_max;
}

Sinogram LinearizationPoint::attenuated_radon(const ScalarField& g) const {
    require_same_grid(base_.a, g, "LinearizationPoint::attenuated_radon");
    return frame_radon(attenuation_, g, angles_);
}

ScalarField LinearizationPoint::focused(const ScalarField& g) const {
    require_same_grid(base_.a, g, "LinearizationPoint::focused");
    ScalarField m(spec());
    ScalarField u(spec());
    for (int k = 0; k < angles_.count; ++k) {
        const double theta = angles_.angle(k);
        incoming_sweep(steps_[k], to_frame(g, theta), u);
        m += from_frame(u, theta);
    }
    m *= angles_.step();
    return m;
}

Sinogram LinearizationPoint::weighted_source(const ScalarField& da) const {
    require_same_grid(base_.a, da, "LinearizationPoint::weighted_source");
    return frame_radon(w_source_, da, angles_);
}

Sinogram LinearizationPoint::weighted_scatter(const ScalarField& da) const {
    require_same_grid(base_.a, da, "LinearizationPoint::weighted_scatter");
    return frame_radon(w_scatter_, da, angles_);
}

ScalarField LinearizationPoint::scatter_sensitivity(const ScalarField& da, const ScalarField& df) const {
    require_same_grid(base_.a, da, "LinearizationPoint::scatter_sensitivity");
    require_same_grid(base_.a, df, "LinearizationPoint::scatter_sensitivity");
    const int n = spec().n;
    ScalarField acc(spec());
    ScalarField db(spec());
    ScalarField src(spec());
    ScalarField v(spec());
    for (int k = 0; k < angles_.count; ++k) {
        const double theta = angles_.angle(k);
        cumsum_backward_rows(to_frame(da, theta), db);
        const ScalarField df_frame = to_frame(df, theta);
        const ScalarField& f_frame = source_frames_[k];
        for (std::size_t i = 0; i < spec().size(); ++i)
            src.values()[i] = f_frame.values()[i] * db.values()[i] - df_frame.values()[i];
        incoming_sweep(steps_[k], src, v);
        const ScalarField& u = ballistic_[k];
        for (int i = 0; i < n; ++i) {
            const double* b = db.row(i);
            const double* ur = u.row(i);
            double* vr = v.row(i);
            for (int j = 0; j < n; ++j) vr[j] = b[j] * ur[j] - vr[j];
        }
        acc += from_frame(v, theta);
    }
    acc *= angles_.step();
    return multiply(base_.a, acc);
}

ScalarField d_focused(const LinearizationPoint& point, const ScalarField& da) {
    require_same_grid(point.base().a, da, "d_focused");
    const GridSpec& spec = point.spec();
    const AngleSet& angles = point.angles();
    ScalarField acc(spec);
    ScalarField db(spec);
    ScalarField v(spec);
    for (int k = 0; k < angles.count; ++k) {
        const double theta = angles.angle(k);
        cumsum_backward_rows(to_frame(da, theta), db);
        incoming_sweep(point.steps(k), multiply(point.source_frame(k), db), v);
        ScalarField du = multiply(db, point.ballistic(k));
        du -= v;
        acc += from_frame(du, theta);
    }
    acc *= angles.step();
    return acc;
}

MeasurementPair apply_DA(const LinearizationPoint& point, const PerturbationPair& pert) {
    MeasurementPair out;
    out.c_scatter = point.c_scatter();
    out.a0 = point.weighted_source(pert.da) + point.attenuated_radon(pert.df);
    ScalarField g = multiply(pert.da, point.m_field());
    g += point.scatter_sensitivity(pert.da, pert.df);
    out.a1 = (point.weighted_scatter(pert.da) + point.attenuated_radon(g)) * point.c_scatter();
    return out;
}

ScalarField precondition(const LinearizationPoint& point, const Sinogram& J) {
    require_same_layout(J, Sinogram(point.spec(), point.angles()), "precondition");
    const auto& phi = point.cutoffs().phi;
    Sinogram cut = J;
    for (int i = 0; i < cut.n_s(); ++i)
        for (int k = 0; k < cut.n_theta(); ++k) cut(i, k) *= phi[i];
    return multiply(point.novikov().invert(cut), point.cutoffs().chi);
}

FieldPair apply_L(const LinearizationPoint& point, const PerturbationPair& pert) {
    FieldPair out;
    out.first = precondition(point, point.weighted_source(pert.da));
    out.first += pert.df;
    out.second = multiply(pert.da, point.m_field());
    return out;
}

FieldPair apply_Q(const LinearizationPoint& point, const PerturbationPair& pert) {
    FieldPair out;
    out.first = ScalarField(point.spec());
    out.second = precondition(point, point.weighted_scatter(pert.da));
    out.second += point.scatter_sensitivity(pert.da, pert.df);
    return out;
}

PerturbationPair apply_L_inverse(const LinearizationPoint& point, const ScalarField& g, const ScalarField& h) {
    require_same_grid(point.base().a, g, "apply_L_inverse");
    require_same_grid(point.base().a, h, "apply_L_inverse");
    if (point.degenerate()) {
        throw DegenerateFocusedTransform("focused transform minimum " + std::to_string(point.m_min_on_disc()) +
                                         " on the unit disc is below the floor " + std::to_string(point.m_floor()));
    }
    const ScalarField& support = point.support();
    const ScalarField& m = point.m_field();
    PerturbationPair out{ScalarField(point.spec()), ScalarField(point.spec())};
    for (std::size_t i = 0; i < point.spec().size(); ++i)
        if (support.values()[i] > 0.0) out.da.values()[i] = h.values()[i] / m.values()[i];
    const ScalarField coupling = precondition(point, point.weighted_source(out.da));
    for (std::size_t i = 0; i < point.spec().size(); ++i)
        if (support.values()[i] > 0.0) out.df.values()[i] = g.values()[i] - coupling.values()[i];
    return out;
}

double pair_norm(const PerturbationPair& p) { return std::hypot(l2_norm(p.da), l2_norm(p.df)); }

NeumannResult apply_LQ_inverse(const LinearizationPoint& point, const ScalarField& g, const ScalarField& h,
                               int terms) {
    if (terms < 1) throw std::invalid_argument("apply_LQ_inverse: at least one term required");
    NeumannResult out;
    PerturbationPair term = apply_L_inverse(point, g, h);
    out.sum = term;
    double previous = pair_norm(term);
    for (int k = 1; k < terms; ++k) {
        const FieldPair q = apply_Q(point, term);
        term = apply_L_inverse(point, q.first, q.second);
        term.da *= -1.0;
        term.df *= -1.0;
        const double norm = pair_norm(term);
        const double ratio = previous > 0.0 ? norm / previous : 0.0;
        out.ratios.push_back(ratio);
        if (ratio >= 1.0) out.divergent = true;
        previous = norm;
        out.sum.da += term.da;
        out.sum.df += term.df;
    }
    return out;
}

}  // namespace spect
