#include "spect/transport.hpp"

#include <cmath>

namespace spect {

CoeffPair::CoeffPair(ScalarField a_, ScalarField f_) : a(std::move(a_)), f(std::move(f_)) {
    require_same_grid(a, f, "CoeffPair");
}

ScalarField step_factors(const ScalarField& a_frame) {
    const int n = a_frame.n();
    const double half_h = 0.5 * a_frame.spec().spacing();
    ScalarField steps(a_frame.spec(), 1.0);
    for (int i = 0; i < n; ++i) {
        const double* a = a_frame.row(i);
        double* e = steps.row(i);
        for (int j = 1; j < n; ++j) e[j] = std::exp(-half_h * (a[j - 1] + a[j]));
    }
    return steps;
}

void incoming_sweep(const ScalarField& steps, const ScalarField& src_frame, ScalarField& out) {
    const int n = src_frame.n();
    const double half_h = 0.5 * src_frame.spec().spacing();
    if (!(out.spec() == src_frame.spec())) out = ScalarField(src_frame.spec());
    for (int i = 0; i < n; ++i) {
        const double* e = steps.row(i);
        const double* q = src_frame.row(i);
        double* u = out.row(i);
        u[0] = half_h * q[0];
        for (int j = 1; j < n; ++j) u[j] = (u[j - 1] + half_h * q[j - 1]) * e[j] + half_h * q[j];
    }
}

ScalarField solve_ballistic(const CoeffPair& pair, double theta) {
    ScalarField u(pair.spec());
    incoming_sweep(step_factors(to_frame(pair.a, theta)), to_frame(pair.f, theta), u);
    return from_frame(u, theta);
}

ScalarField focused_transform(const CoeffPair& pair, const AngleSet& angles) {
    ScalarField m(pair.spec());
    ScalarField u(pair.spec());
    for (int k = 0; k < angles.count; ++k) {
        const double theta = angles.angle(k);
        incoming_sweep(step_factors(to_frame(pair.a, theta)), to_frame(pair.f, theta), u);
        m += from_frame(u, theta);
    }
    m *= angles.step();
    return m;
}

ScalarField solve_scatter_order(const CoeffPair& pair, const ScalarField& source, double theta, double c_scatter) {
    require_same_grid(pair.a, source, "solve_scatter_order");
    const ScalarField effective = multiply(pair.a, source) * c_scatter;
    ScalarField u(pair.spec());
    incoming_sweep(step_factors(to_frame(pair.a, theta)), to_frame(effective, theta), u);
    return from_frame(u, theta);
}

MeasurementPair albedo(const CoeffPair& pair, const AngleSet& angles, double c_scatter) {
    MeasurementPair out;
    out.c_scatter = c_scatter;
    out.a0 = attenuated_radon(pair.a, pair.f, angles);
    const ScalarField m = focused_transform(pair, angles);
    out.a1 = attenuated_radon(pair.a, multiply(pair.a, m), angles) * c_scatter;
    return out;
}

}  // namespace spect
