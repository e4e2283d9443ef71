#pragma once

// Modified Newton-Raphson reconstruction of (a, f) from the albedo data. The
// linear operators are built at the mollified iterate; each update applies
// the truncated Neumann inverse of L + Q to the preconditioned residual.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spect/grid.hpp"
#include "spect/linearized.hpp"
#include "spect/transport.hpp"

namespace spect {

class ZeroReference : public std::invalid_argument {
public:
    explicit ZeroReference(const std::string& what) : std::invalid_argument(what) {}
};

struct ReconConfig {
    GridSpec grid;
    AngleSet angles;
    int iters = 8;
    int neumann_terms = 4;
    double mollifier_width_cells = 2.0;
    double c_scatter = default_c_scatter;
    bool project_nonneg = false;
    double m_floor_rel = 1e-6;
    double damping = 1.0;
    /// When false the scatter residual is replaced by zero, so only the
    /// ballistic data drives the update.
    bool use_scatter_data = true;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Diagnostics for one iterate. Record n describes (a^n, f^n): the residual
/// norms of the mollified iterate against the data (the second component
/// with C divided out), the RMS errors against the truth when known, and the
/// Neumann ratios of the update that produced it (empty for n = 0).
struct IterationRecord {
    int iteration = 0;
    double residual0 = 0.0;
    double residual1 = 0.0;
    std::optional<double> rms_a;
    std::optional<double> rms_f;
    std::vector<double> neumann_ratios;
    bool divergent = false;
};

struct ReconState {
    CoeffPair iterate;
    std::vector<IterationRecord> history;
};

/// Convolution with the unit-mass bump (1 - r^2 / rho^2)^2, rho = eps_cells h.
ScalarField mollify(const ScalarField& g, double eps_cells);

/// Initial guess (0, indicator of the unit disc).
CoeffPair initial_guess(const GridSpec& spec);

/// 100 ||rec - truth|| / ||truth|| over the unit disc.
double rms_error(const ScalarField& rec, const ScalarField& truth);

struct StepResult {
    double residual0 = 0.0;
    double residual1 = 0.0;
    NeumannResult update;
};

/// One update of the scheme. Returns the residual of the incoming iterate
/// and the Neumann diagnostics; `pair` is overwritten with the new iterate.
StepResult newton_step(CoeffPair& pair, const MeasurementPair& data, const ReconConfig& cfg);

/// Residual norms of the mollified pair against the data.
std::pair<double, double> residual_norms(const CoeffPair& pair, const MeasurementPair& data, const ReconConfig& cfg);

/// Runs cfg.iters steps from the initial guess. history[n] describes iterate
/// n, so the history holds iters + 1 records; the last residual costs one
/// extra forward solve. on_record sees each record as soon as it is complete.
ReconState reconstruct(const MeasurementPair& data, const ReconConfig& cfg,
                       const std::optional<CoeffPair>& truth = std::nullopt,
                       const std::function<void(const IterationRecord&)>& on_record = {});

}  // namespace spect
