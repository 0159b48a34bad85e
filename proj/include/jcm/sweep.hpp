// sweep.hpp — Grid sweeps over (Delta_c, delta_2), optimal-g2 scans, presets, CSV
#pragma once

#include "jcm/model.hpp"
#include "jcm/spectrum.hpp"
#include "jcm/steady.hpp"
#include "jcm/twotime.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jcm {

enum class Observable { NS, G12, G13, G22, PTilde };

const char* observable_name(Observable o);
Observable observable_from_name(const std::string& name);

struct AxisSpec {
    double from = 0;
    double to = 0;
    int points = 1;

    double value_at(int i) const {
        return points == 1 ? from : from + (to - from) * i / double(points - 1);
    }
    void validate() const {
        if (points < 1) throw std::invalid_argument("AxisSpec: points must be >= 1");
        if (!std::isfinite(from) || !std::isfinite(to))
            throw std::invalid_argument("AxisSpec: range must be finite");
    }
};

struct NumericsOptions {
    int fock_cutoff = 10;
    int escalated_cutoff = 14;  // retried once when the cutoff population is suspect
    double steady_residual_tol = 1e-10;
    double abs_tol = 1e-12;  // integrator tolerances for correlation traces
    double rel_tol = 1e-9;
    int workers = 0;  // 0 = hardware concurrency
};

enum class SweepKind { Plane, Line, Correlate, ScanOptimal };

const char* sweep_kind_name(SweepKind k);
SweepKind sweep_kind_from_name(const std::string& name);

struct SweepSpec {
    SweepKind kind = SweepKind::Plane;
    ModelParams model;  // template; delta_c and delta2_ratio are set per grid point
    int spin_dim = 3;   // 2 selects the two-level reference model

    AxisSpec delta_c_over_g;  // axis 1 (inner, fastest varying)
    AxisSpec delta2_ratio;    // axis 2 (outer)

    std::vector<Observable> observables;
    NumericsOptions numerics;

    std::vector<int> correlation_orders;  // bundle orders n for g_n^(2)(tau)
    std::vector<double> tau_grid;         // empty = default grid

    bool wants(Observable o) const;
    void validate() const;
};

struct ResultRow {
    double delta_c_over_g = 0;
    double delta2_ratio = 0;
    std::optional<double> n_s, g12, g13, g22, ptilde1, ptilde2;
    // analytic resonance overlays at this delta_2 ratio (absent = NoRoot)
    std::optional<double> res_d1_minus, res_d1_plus, res_d2_minus, res_d2_plus;
    std::vector<std::string> flags;
};

// One steady-state solve; the workhorse behind every grid point.
ResultRow compute_point(const SweepSpec& spec, double delta_c_over_g, double delta2_ratio_value);

// Full grid in axis2-major order; grid points are dispatched to a worker pool
// and gathered by index, so output is independent of scheduling.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

struct OptimalScanRow {
    double delta2_ratio = 0;
    std::optional<double> g2_opt;
    std::optional<double> n_s_opt;
    std::optional<double> delta_c_opt_over_g;
    std::vector<std::string> flags;
};

// Per delta_2: coarse grid over the delta_c_over_g axis, then golden-section
// refinement of min g_1^(2)(0), reporting n_s at the same detuning. A
// single-point Delta_c axis degenerates to evaluating that point.
std::vector<OptimalScanRow> scan_optimal(const SweepSpec& spec);

struct CorrelatePointResult {
    ResultRow summary;
    std::vector<CorrelationTrace> traces;  // one per requested bundle order
};

CorrelatePointResult run_correlate(const SweepSpec& spec);

// --------------------------- presets ----------------------------------------

// Named scenario presets (operating points and grids for the bundled studies).
std::vector<std::string> preset_names();
SweepSpec preset(const std::string& name);

// --------------------------- CSV --------------------------------------------

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_rows_csv(std::istream& is);

void write_scan_csv(std::ostream& os, const std::vector<OptimalScanRow>& rows);
void write_trace_csv(std::ostream& os, const CorrelationTrace& trace);
void write_resonance_csv(std::ostream& os, const std::vector<ResonanceCurve>& curves);

// 9-significant-digit formatting used for every CSV number.
std::string format_number(double v);

}  // namespace jcm
