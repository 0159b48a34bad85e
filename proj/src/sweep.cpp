// sweep.cpp
#include "jcm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace jcm {

namespace {

// Fixed-order worker pool: tasks are indexed, results land by index, so the
// outcome is identical for any worker count.
void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    if (workers <= 0) workers = int(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct SolvedPoint {
    SteadyStateResult steady;
    std::vector<std::string> flags;
    int cutoff_used = 0;
};

ModelParams point_model(const SweepSpec& spec, double delta_c_over_g, double delta2_ratio_value) {
    ModelParams m = spec.model;
    m.delta_c = delta_c_over_g * m.g;
    m.delta2_ratio = delta2_ratio_value;
    m.delta1_abs.reset();
    m.delta2_abs.reset();
    m.validate();
    return m;
}

Superoperator liouvillian_for(const ModelParams& m, int spin_dim, int fock_cutoff) {
    const HilbertSpace space{fock_cutoff, spin_dim};
    const SparseOperator h = spin_dim == 3 ? build_hamiltonian(m, space, true)
                                           : build_two_level_jcm(m, space);
    return build_liouvillian(h, collapse_operators(m, space));
}

SolvedPoint solve_point(const SweepSpec& spec, const ModelParams& m) {
    SolvedPoint out;
    SteadyStateOptions opts;
    opts.residual_tol = spec.numerics.steady_residual_tol;

    out.cutoff_used = spec.numerics.fock_cutoff;
    out.steady = steady_state(liouvillian_for(m, spec.spin_dim, out.cutoff_used), opts);
    if (out.steady.truncation_suspect &&
        spec.numerics.escalated_cutoff > spec.numerics.fock_cutoff) {
        out.cutoff_used = spec.numerics.escalated_cutoff;
        out.steady = steady_state(liouvillian_for(m, spec.spin_dim, out.cutoff_used), opts);
        out.flags.push_back("cutoff_escalated");
    }
    if (out.steady.truncation_suspect) out.flags.push_back("truncation_suspect");
    return out;
}

void fill_observables(const SweepSpec& spec, const DensityMatrix& rho, ResultRow& row) {
    const PhotonDistribution dist = photon_distribution(rho);
    if (spec.wants(Observable::NS)) row.n_s = dist.n_s;
    auto set_g = [&](Observable o, int n, int k, std::optional<double>& slot,
                     const char* flag) {
        if (!spec.wants(o)) return;
        slot = equal_time_g(rho, n, k);
        if (!slot) row.flags.emplace_back(flag);
    };
    set_g(Observable::G12, 1, 2, row.g12, "undefined_g12");
    set_g(Observable::G13, 1, 3, row.g13, "undefined_g13");
    set_g(Observable::G22, 2, 2, row.g22, "undefined_g22");
    if (spec.wants(Observable::PTilde)) {
        if (dist.ptilde && dist.ptilde->size() > 2) {
            row.ptilde1 = (*dist.ptilde)(1);
            row.ptilde2 = (*dist.ptilde)(2);
        } else {
            row.flags.emplace_back("undefined_ptilde");
        }
    }
}

void attach_resonance_overlay(double delta1_ratio, double delta2_ratio_value, double g,
                              double window, ResultRow& row) {
    auto pick = [&](int n, Branch b) -> std::optional<double> {
        const auto root = resonance_frequency(n, b, delta1_ratio, delta2_ratio_value, g, window);
        if (!root) return std::nullopt;
        return root->delta_c / g;
    };
    row.res_d1_minus = pick(1, Branch::Minus);
    row.res_d1_plus = pick(1, Branch::Plus);
    row.res_d2_minus = pick(2, Branch::Minus);
    row.res_d2_plus = pick(2, Branch::Plus);
}

double overlay_window(const SweepSpec& spec) {
    const double span = std::max(std::abs(spec.delta_c_over_g.from),
                                 std::abs(spec.delta_c_over_g.to));
    return std::max(4.0, span) * spec.model.g;
}

}  // namespace

// --------------------------- names -------------------------------------------

const char* observable_name(Observable o) {
    switch (o) {
        case Observable::NS: return "n_s";
        case Observable::G12: return "g12";
        case Observable::G13: return "g13";
        case Observable::G22: return "g22";
        case Observable::PTilde: return "p_tilde";
    }
    throw std::invalid_argument("observable_name: unknown observable");
}

Observable observable_from_name(const std::string& name) {
    for (Observable o : {Observable::NS, Observable::G12, Observable::G13, Observable::G22,
                         Observable::PTilde})
        if (name == observable_name(o)) return o;
    throw std::invalid_argument("unknown observable: " + name);
}

const char* sweep_kind_name(SweepKind k) {
    switch (k) {
        case SweepKind::Plane: return "plane";
        case SweepKind::Line: return "line";
        case SweepKind::Correlate: return "correlate";
        case SweepKind::ScanOptimal: return "scan";
    }
    throw std::invalid_argument("sweep_kind_name: unknown kind");
}

SweepKind sweep_kind_from_name(const std::string& name) {
    for (SweepKind k : {SweepKind::Plane, SweepKind::Line, SweepKind::Correlate,
                        SweepKind::ScanOptimal})
        if (name == sweep_kind_name(k)) return k;
    throw std::invalid_argument("unknown sweep kind: " + name);
}

bool SweepSpec::wants(Observable o) const {
    return std::find(observables.begin(), observables.end(), o) != observables.end();
}

void SweepSpec::validate() const {
    model.validate();
    delta_c_over_g.validate();
    delta2_ratio.validate();
    if (spin_dim != 2 && spin_dim != 3)
        throw std::invalid_argument("SweepSpec: spin_dim must be 2 or 3");
    if (numerics.fock_cutoff < 1)
        throw std::invalid_argument("SweepSpec: fock_cutoff must be >= 1");
    if (numerics.escalated_cutoff < numerics.fock_cutoff)
        throw std::invalid_argument("SweepSpec: escalated_cutoff must be >= fock_cutoff");
    if (observables.empty())
        throw std::invalid_argument("SweepSpec: at least one observable is required");
    for (int n : correlation_orders)
        if (n < 1) throw std::invalid_argument("SweepSpec: correlation orders must be >= 1");
}

// --------------------------- point solver ------------------------------------

ResultRow compute_point(const SweepSpec& spec, double delta_c_over_g,
                        double delta2_ratio_value) {
    ResultRow row;
    row.delta_c_over_g = delta_c_over_g;
    row.delta2_ratio = delta2_ratio_value;

    const ModelParams m = point_model(spec, delta_c_over_g, delta2_ratio_value);
    if (m.delta_c == 0.0) row.flags.emplace_back("degenerate_delta_c_zero");

    try {
        SolvedPoint solved = solve_point(spec, m);
        row.flags.insert(row.flags.end(), solved.flags.begin(), solved.flags.end());
        fill_observables(spec, solved.steady.rho, row);
    } catch (const SteadyStateError& err) {
        row.flags.emplace_back(err.kind() == SteadyStateError::Kind::NonUnique
                                   ? "steady_nonunique"
                                   : "steady_not_converged");
    }
    return row;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const int n1 = spec.delta_c_over_g.points;
    const int n2 = spec.delta2_ratio.points;
    std::vector<ResultRow> rows(std::size_t(n1) * n2);

    // Overlay roots depend only on the outer axis; solve each value once.
    std::vector<ResultRow> overlays(n2);
    const double window = overlay_window(spec);
    for (int j = 0; j < n2; ++j)
        attach_resonance_overlay(spec.model.delta1_ratio, spec.delta2_ratio.value_at(j),
                                 spec.model.g, window, overlays[j]);

    parallel_for(n1 * n2, spec.numerics.workers, [&](int idx) {
        const int j = idx / n1;  // axis2-major
        const int i = idx % n1;
        ResultRow row = compute_point(spec, spec.delta_c_over_g.value_at(i),
                                      spec.delta2_ratio.value_at(j));
        row.res_d1_minus = overlays[j].res_d1_minus;
        row.res_d1_plus = overlays[j].res_d1_plus;
        row.res_d2_minus = overlays[j].res_d2_minus;
        row.res_d2_plus = overlays[j].res_d2_plus;
        rows[idx] = std::move(row);
    });
    return rows;
}

// --------------------------- optimal scan ------------------------------------

namespace {

// g_1^(2)(0) as a function of Delta_c/g; undefined points rank as +inf.
double scan_objective(const SweepSpec& spec, double delta2_ratio_value, double x) {
    const ModelParams m = point_model(spec, x, delta2_ratio_value);
    try {
        const SolvedPoint solved = solve_point(spec, m);
        const auto g2 = equal_time_g(solved.steady.rho, 1, 2);
        return g2 ? *g2 : std::numeric_limits<double>::infinity();
    } catch (const SteadyStateError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

std::vector<OptimalScanRow> scan_optimal(const SweepSpec& spec) {
    spec.validate();
    const int n2 = spec.delta2_ratio.points;
    const AxisSpec& axis = spec.delta_c_over_g;
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);

    std::vector<OptimalScanRow> rows(n2);
    parallel_for(n2, spec.numerics.workers, [&](int j) {
        OptimalScanRow row;
        row.delta2_ratio = spec.delta2_ratio.value_at(j);
        auto f = [&](double x) { return scan_objective(spec, row.delta2_ratio, x); };

        int best = -1;
        double best_val = std::numeric_limits<double>::infinity();
        for (int i = 0; i < axis.points; ++i) {
            const double v = f(axis.value_at(i));
            if (v < best_val) {
                best_val = v;
                best = i;
            }
        }
        if (best < 0 || !std::isfinite(best_val)) {
            row.flags.emplace_back("undefined_objective");
            rows[j] = std::move(row);
            return;
        }

        double x_opt = axis.value_at(best);
        double g2_opt = best_val;
        if (axis.points > 1) {
            if (best == 0 || best == axis.points - 1)
                row.flags.emplace_back("no_interior_minimum");
            double a = axis.value_at(std::max(best - 1, 0));
            double b = axis.value_at(std::min(best + 1, axis.points - 1));
            double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
            double f1 = f(x1), f2 = f(x2);
            while (b - a > 1e-4) {
                if (f1 <= f2) {
                    b = x2; x2 = x1; f2 = f1;
                    x1 = b - golden * (b - a); f1 = f(x1);
                } else {
                    a = x1; x1 = x2; f1 = f2;
                    x2 = a + golden * (b - a); f2 = f(x2);
                }
            }
            if (std::min(f1, f2) < g2_opt) {  // refinement should never lose to the grid
                x_opt = f1 <= f2 ? x1 : x2;
                g2_opt = std::min(f1, f2);
            }
        }

        row.delta_c_opt_over_g = x_opt;
        row.g2_opt = g2_opt;
        const ModelParams m = point_model(spec, x_opt, row.delta2_ratio);
        try {
            row.n_s_opt = photon_number(solve_point(spec, m).steady.rho);
        } catch (const SteadyStateError&) {
            row.flags.emplace_back("steady_not_converged");
        }
        rows[j] = std::move(row);
    });
    return rows;
}

// --------------------------- correlations ------------------------------------

CorrelatePointResult run_correlate(const SweepSpec& spec) {
    spec.validate();
    if (spec.correlation_orders.empty())
        throw std::invalid_argument("run_correlate: no correlation orders requested");

    const double x = spec.delta_c_over_g.value_at(0);
    const double r2 = spec.delta2_ratio.value_at(0);

    CorrelatePointResult out;
    out.summary.delta_c_over_g = x;
    out.summary.delta2_ratio = r2;

    const ModelParams m = point_model(spec, x, r2);
    if (m.delta_c == 0.0) out.summary.flags.emplace_back("degenerate_delta_c_zero");
    const SolvedPoint solved = solve_point(spec, m);  // SteadyStateError propagates: no traces
    out.summary.flags.insert(out.summary.flags.end(), solved.flags.begin(),
                             solved.flags.end());
    fill_observables(spec, solved.steady.rho, out.summary);
    attach_resonance_overlay(spec.model.delta1_ratio, r2, spec.model.g, overlay_window(spec),
                             out.summary);

    PropagatorOptions popts;
    popts.abs_tol = spec.numerics.abs_tol;
    popts.rel_tol = spec.numerics.rel_tol;
    const Propagator prop(liouvillian_for(m, spec.spin_dim, solved.cutoff_used), popts);

    // The grid is dimensionless delay in units of 1/kappa; the generator runs
    // in raw frequency units, so convert on the way in and report as given.
    const std::vector<double> grid =
        spec.tau_grid.empty() ? default_tau_grid() : spec.tau_grid;
    std::vector<double> times = grid;
    for (double& t : times) t /= m.kappa;
    for (int n : spec.correlation_orders) {
        CorrelationTrace trace = g2_tau(prop, solved.steady.rho, n, times);
        trace.tau_grid = grid;
        out.traces.push_back(std::move(trace));
    }
    return out;
}

// --------------------------- presets -----------------------------------------

namespace {

ModelParams paper_point_model(double eta, double omega) {
    ModelParams m;
    m.g = 6.0;
    m.kappa = 1.0;
    m.gamma = 0.01;
    m.eta = eta;
    m.omega = omega;
    m.delta1_ratio = 0.1;
    m.delta2_ratio = -0.4;
    m.delta_c = 1.0;  // placeholder; every runner overwrites it per point
    return m;
}

SweepSpec plane_spec(double eta, double omega, std::vector<Observable> obs) {
    SweepSpec s;
    s.kind = SweepKind::Plane;
    s.model = paper_point_model(eta, omega);
    s.delta_c_over_g = {-4.0, 4.0, 101};
    s.delta2_ratio = {-0.5, 0.1, 101};
    s.observables = std::move(obs);
    return s;
}

SweepSpec line_spec(double eta, double omega, double r2, std::vector<Observable> obs) {
    SweepSpec s;
    s.kind = SweepKind::Line;
    s.model = paper_point_model(eta, omega);
    s.delta_c_over_g = {-4.0, 4.0, 201};
    s.delta2_ratio = {r2, r2, 1};
    s.observables = std::move(obs);
    return s;
}

SweepSpec correlate_spec(double eta, double omega, double x, double r2,
                         std::vector<int> orders, std::vector<Observable> obs) {
    SweepSpec s;
    s.kind = SweepKind::Correlate;
    s.model = paper_point_model(eta, omega);
    s.delta_c_over_g = {x, x, 1};
    s.delta2_ratio = {r2, r2, 1};
    s.correlation_orders = std::move(orders);
    s.observables = std::move(obs);
    return s;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig3a", "fig3b", "fig3c",
            "fig3d", "fig3e", "fig3f", "fig4a", "fig4b", "fig4c", "twolevel-ref"};
}

SweepSpec preset(const std::string& name) {
    // Photon-blockade scans: cavity drive only.
    if (name == "fig2a") return plane_spec(0.1, 0.0, {Observable::G12});
    if (name == "fig2b") return plane_spec(0.1, 0.0, {Observable::NS});
    if (name == "fig2c")
        return line_spec(0.1, 0.0, -0.4, {Observable::G12, Observable::NS});
    if (name == "fig2d") {
        // Delay trace at the computed single-photon resonance of the -0.4 slice.
        const auto root = resonance_frequency(1, Branch::Minus, 0.1, -0.4, 6.0, 24.0);
        if (!root) throw std::runtime_error("preset fig2d: expected resonance root missing");
        return correlate_spec(0.1, 0.0, root->delta_c / 6.0, -0.4, {1},
                              {Observable::NS, Observable::G12, Observable::PTilde});
    }
    if (name == "fig2e") {
        SweepSpec s = plane_spec(0.1, 0.0, {Observable::G12, Observable::NS});
        s.kind = SweepKind::ScanOptimal;
        s.delta_c_over_g = {-4.0, 4.0, 161};
        s.delta2_ratio = {-0.5, 0.0, 51};
        return s;
    }
    // Photon-bundle scans: spin drive only.
    if (name == "fig3a") return plane_spec(0.0, 0.08, {Observable::G12});
    if (name == "fig3b") return plane_spec(0.0, 0.08, {Observable::G13});
    if (name == "fig3c") return plane_spec(0.0, 0.08, {Observable::NS});
    if (name == "fig3d")
        return line_spec(0.0, 0.08, 0.05, {Observable::G12, Observable::G13});
    if (name == "fig3e") return line_spec(0.0, 0.08, 0.05, {Observable::NS});
    if (name == "fig3f")
        return correlate_spec(0.0, 0.08, 2.5, 0.05, {1, 2},
                              {Observable::NS, Observable::G12, Observable::G22});
    // Combined drives.
    if (name == "fig4a") return plane_spec(0.1, 0.08, {Observable::G12});
    if (name == "fig4b") return plane_spec(0.1, 0.08, {Observable::G13});
    if (name == "fig4c") return plane_spec(0.1, 0.08, {Observable::NS});
    if (name == "twolevel-ref") {
        SweepSpec s;
        s.kind = SweepKind::Line;
        s.model = paper_point_model(0.1, 0.0);
        s.spin_dim = 2;
        s.delta_c_over_g = {-2.0, 2.0, 81};
        s.delta2_ratio = {0.0, 0.0, 1};
        s.observables = {Observable::NS, Observable::G12};
        return s;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

// --------------------------- CSV ---------------------------------------------

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace {

std::string opt_cell(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

std::string log10_cell(const std::optional<double>& v) {
    return v && *v > 0 ? format_number(std::log10(*v)) : std::string();
}

std::string join_flags(const std::vector<std::string>& flags) {
    std::string out;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (i) out += ';';
        out += flags[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep)) cells.push_back(cell);
    if (!line.empty() && line.back() == sep) cells.emplace_back();
    return cells;
}

std::optional<double> parse_cell(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    return std::stod(cell);
}

const char* kRowHeader =
    "delta_c_over_g,delta2_ratio,n_s,g12_0,log10_g12_0,g13_0,log10_g13_0,"
    "g22_0,log10_g22_0,ptilde1,ptilde2,res_delta1_minus_over_g,res_delta1_plus_over_g,"
    "res_delta2_minus_over_g,res_delta2_plus_over_g,flags";

}  // namespace

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << kRowHeader << '\n';
    for (const ResultRow& r : rows) {
        os << format_number(r.delta_c_over_g) << ',' << format_number(r.delta2_ratio) << ','
           << opt_cell(r.n_s) << ',' << opt_cell(r.g12) << ',' << log10_cell(r.g12) << ','
           << opt_cell(r.g13) << ',' << log10_cell(r.g13) << ',' << opt_cell(r.g22) << ','
           << log10_cell(r.g22) << ',' << opt_cell(r.ptilde1) << ',' << opt_cell(r.ptilde2)
           << ',' << opt_cell(r.res_d1_minus) << ',' << opt_cell(r.res_d1_plus) << ','
           << opt_cell(r.res_d2_minus) << ',' << opt_cell(r.res_d2_plus) << ','
           << join_flags(r.flags) << '\n';
    }
}

std::vector<ResultRow> read_rows_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("CSV: missing header");
    if (line != kRowHeader) throw std::runtime_error("CSV: unexpected header: " + line);
    std::vector<ResultRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 16)
            throw std::runtime_error("CSV: expected 16 cells, got " +
                                     std::to_string(cells.size()));
        ResultRow r;
        r.delta_c_over_g = std::stod(cells[0]);
        r.delta2_ratio = std::stod(cells[1]);
        r.n_s = parse_cell(cells[2]);
        r.g12 = parse_cell(cells[3]);
        r.g13 = parse_cell(cells[5]);
        r.g22 = parse_cell(cells[7]);
        r.ptilde1 = parse_cell(cells[9]);
        r.ptilde2 = parse_cell(cells[10]);
        r.res_d1_minus = parse_cell(cells[11]);
        r.res_d1_plus = parse_cell(cells[12]);
        r.res_d2_minus = parse_cell(cells[13]);
        r.res_d2_plus = parse_cell(cells[14]);
        if (!cells[15].empty()) r.flags = split(cells[15], ';');
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_scan_csv(std::ostream& os, const std::vector<OptimalScanRow>& rows) {
    os << "delta2_ratio,g2_opt_0,log10_g2_opt_0,n_s_opt,delta_c_opt_over_g,flags\n";
    for (const OptimalScanRow& r : rows) {
        os << format_number(r.delta2_ratio) << ',' << opt_cell(r.g2_opt) << ','
           << log10_cell(r.g2_opt) << ',' << opt_cell(r.n_s_opt) << ','
           << opt_cell(r.delta_c_opt_over_g) << ',' << join_flags(r.flags) << '\n';
    }
}

void write_trace_csv(std::ostream& os, const CorrelationTrace& trace) {
    os << "tau_over_inv_kappa,g_value\n";
    for (std::size_t i = 0; i < trace.tau_grid.size(); ++i)
        os << format_number(trace.tau_grid[i]) << ',' << format_number(trace.values[i])
           << '\n';
}

void write_resonance_csv(std::ostream& os, const std::vector<ResonanceCurve>& curves) {
    os << "n,branch,delta2_ratio,delta_c_over_g,residual,flags\n";
    for (const ResonanceCurve& curve : curves) {
        for (const ResonanceSample& s : curve.samples) {
            os << curve.n << ',' << branch_name(curve.branch) << ','
               << format_number(s.delta2_ratio) << ',';
            if (s.delta_c) {
                os << format_number(*s.delta_c / curve.g) << ',' << format_number(s.residual)
                   << ",\n";
            } else {
                os << ",,no_root\n";
            }
        }
    }
}

}  // namespace jcm
