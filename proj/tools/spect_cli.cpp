#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "spect/io.hpp"
#include "spect/noise.hpp"
#include "spect/phantoms.hpp"
#include "spect/recon.hpp"
#include "spect/transport.hpp"

using namespace spect;

namespace {

std::string fixed_4(double v) {
    int decimals = 3;
    if (v != 0.0) decimals = std::max(0, 3 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    // Rounding can carry into a new leading digit (9.9996 -> 10.000).
    const double rounded = std::stod(buf);
    if (rounded != 0.0 && decimals > 0 && static_cast<int>(std::floor(std::log10(std::abs(rounded)))) >
                                              static_cast<int>(std::floor(std::log10(std::abs(v)))))
        std::snprintf(buf, sizeof buf, "%.*f", decimals - 1, v);
    return buf;
}

std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

void write_cut(const std::string& path, const CoeffPair& pair) {
    const GridSpec& spec = pair.spec();
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path);
    out << "y,a,f\n";
    // x = 0 falls between the two central columns for even n.
    const int j1 = spec.n / 2, j0 = spec.n % 2 ? j1 : j1 - 1;
    for (int i = 0; i < spec.n; ++i)
        out << format_real(spec.coord(i)) << ',' << format_real(0.5 * (pair.a(i, j0) + pair.a(i, j1))) << ','
            << format_real(0.5 * (pair.f(i, j0) + pair.f(i, j1))) << '\n';
}

CoeffPair read_pair(const std::string& a_path, const std::string& f_path) {
    ScalarField a = read_field(a_path), f = read_field(f_path);
    if (!(a.spec() == f.spec())) throw GridMismatch("attenuation and source files have different grids");
    return {std::move(a), std::move(f)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-D SPECT simulation and joint attenuation/source reconstruction"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    auto* phantom = app.add_subcommand("phantom", "write a phantom (a, f) pair");
    std::string family, out_a, out_f;
    int n = 128;
    const std::map<std::string, PhantomFamily> families{
        {"radial", PhantomFamily::radial}, {"trapping", PhantomFamily::trapping}, {"discs", PhantomFamily::discs}};
    phantom->add_option("--family", family, "radial, trapping or discs")->required()->check(CLI::IsMember(families));
    phantom->add_option("--n", n, "grid size")->check(CLI::PositiveNumber);
    phantom->add_option("--out-a", out_a)->required();
    phantom->add_option("--out-f", out_f)->required();

    auto* forward = app.add_subcommand("forward", "simulate ballistic and single-scatter data");
    std::string in_a, in_f, out_a0, out_a1;
    int ntheta = 0;
    double c_scatter = default_c_scatter;
    forward->add_option("--a", in_a)->required()->check(CLI::ExistingFile);
    forward->add_option("--f", in_f)->required()->check(CLI::ExistingFile);
    forward->add_option("--ntheta", ntheta, "number of angles (default: grid size)")->check(CLI::PositiveNumber);
    forward->add_option("--c-scatter", c_scatter)->check(CLI::PositiveNumber);
    forward->add_option("--out-a0", out_a0)->required();
    forward->add_option("--out-a1", out_a1)->required();

    auto* noise = app.add_subcommand("noise", "apply instrument and background noise to a sinogram");
    std::string noise_in, noise_out, quantum_ref;
    double amp = 0.0, bias = 0.0;
    std::optional<double> quantum;
    std::uint64_t seed = 0;
    noise->add_option("--in", noise_in)->required()->check(CLI::ExistingFile);
    noise->add_option("--amp", amp)->check(CLI::NonNegativeNumber);
    noise->add_option("--bias", bias)->check(CLI::NonNegativeNumber);
    auto* q_opt = noise->add_option("--quantum", quantum, "energy per background photon")->check(CLI::PositiveNumber);
    noise->add_option("--quantum-ref", quantum_ref, "sinogram whose mean positive pixel / 50 sets the quantum")
        ->check(CLI::ExistingFile)
        ->excludes(q_opt);
    noise->add_option("--seed", seed);
    noise->add_option("--out", noise_out)->required();

    auto* recon = app.add_subcommand("recon", "reconstruct (a, f) from the data pair");
    std::string rec_a0, rec_a1, truth_a, truth_f, log_path, cut_path;
    ReconConfig cfg{GridSpec(8), AngleSet(8)};
    recon->add_option("--a0", rec_a0)->required()->check(CLI::ExistingFile);
    recon->add_option("--a1", rec_a1)->required()->check(CLI::ExistingFile);
    recon->add_option("--iters", cfg.iters)->check(CLI::NonNegativeNumber);
    recon->add_option("--neumann", cfg.neumann_terms)->check(CLI::PositiveNumber);
    recon->add_option("--eps-cells", cfg.mollifier_width_cells)->check(CLI::NonNegativeNumber);
    recon->add_option("--c-scatter", cfg.c_scatter)->check(CLI::PositiveNumber);
    recon->add_option("--damping", cfg.damping)->check(CLI::PositiveNumber);
    auto* ta = recon->add_option("--truth-a", truth_a)->check(CLI::ExistingFile);
    auto* tf = recon->add_option("--truth-f", truth_f)->check(CLI::ExistingFile);
    ta->needs(tf);
    tf->needs(ta);
    recon->add_flag("--project-nonneg", cfg.project_nonneg);
    recon->add_option("--out-a", out_a)->required();
    recon->add_option("--out-f", out_f)->required();
    recon->add_option("--log", log_path)->required();
    recon->add_option("--cut-x0", cut_path, "CSV of the final iterate along x = 0");

    auto* metrics = app.add_subcommand("metrics", "relative RMS error in percent over the unit disc");
    std::string rec_path, truth_path;
    metrics->add_option("--rec", rec_path)->required()->check(CLI::ExistingFile);
    metrics->add_option("--truth", truth_path)->required()->check(CLI::ExistingFile);

    auto* pgm = app.add_subcommand("export-pgm", "export a field or sinogram as a 16-bit PGM");
    std::string pgm_in, pgm_out;
    bool crop = false;
    pgm->add_option("--in", pgm_in)->required()->check(CLI::ExistingFile);
    pgm->add_option("--out", pgm_out)->required();
    pgm->add_flag("--crop-unit-square", crop);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*phantom) {
            const CoeffPair p = make_phantom({families.at(family), GridSpec(n), {}, {}});
            write_field(out_a, p.a);
            write_field(out_f, p.f);
        } else if (*forward) {
            const CoeffPair p = read_pair(in_a, in_f);
            const MeasurementPair m = albedo(p, AngleSet(ntheta > 0 ? ntheta : p.spec().n), c_scatter);
            write_sinogram(out_a0, m.a0);
            write_sinogram(out_a1, m.a1);
        } else if (*noise) {
            const Sinogram s = read_sinogram(noise_in);
            double q = quantum.value_or(0.0);
            if (!quantum) q = default_quantum(quantum_ref.empty() ? s : read_sinogram(quantum_ref));
            write_sinogram(noise_out, apply_noise(s, {amp, bias, q, seed}));
        } else if (*recon) {
            MeasurementPair data{read_sinogram(rec_a0), read_sinogram(rec_a1), cfg.c_scatter};
            cfg.grid = data.a0.spec();
            cfg.angles = data.a0.angles();
            std::optional<CoeffPair> truth;
            if (!truth_a.empty()) truth = read_pair(truth_a, truth_f);
            std::ofstream log(log_path);
            if (!log) throw FormatError("cannot open " + log_path);
            log << "iteration,residual0,residual1,rms_a,rms_f,neumann_ratio\n";
            const ReconState st = reconstruct(data, cfg, truth, [&](const IterationRecord& r) {
                double worst = 0.0;
                for (double x : r.neumann_ratios) worst = std::max(worst, x);
                if (r.divergent)
                    log << "# warning: Neumann series divergent in the update to iteration " << r.iteration
                        << " (ratio " << format_real(worst) << ")\n";
                log << r.iteration << ',' << format_real(r.residual0) << ',' << format_real(r.residual1) << ','
                    << optional_real(r.rms_a) << ',' << optional_real(r.rms_f) << ','
                    << (r.neumann_ratios.empty() ? "" : format_real(worst)) << '\n';
                log.flush();
            });
            write_field(out_a, st.iterate.a);
            write_field(out_f, st.iterate.f);
            if (!cut_path.empty()) write_cut(cut_path, st.iterate);
        } else if (*metrics) {
            std::cout << fixed_4(rms_error(read_field(rec_path), read_field(truth_path))) << '\n';
        } else if (*pgm) {
            std::ifstream probe(pgm_in, std::ios::binary);
            std::string magic(5, '\0');
            probe.read(magic.data(), 5);
            const Image img = magic == "SPSIN" ? sinogram_image(read_sinogram(pgm_in))
                                               : field_image(read_field(pgm_in), crop);
            write_pgm(pgm_out, img);
        }
    } catch (const DegenerateFocusedTransform& e) {
        std::cerr << "error: degenerate focused transform: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
