// main.cpp — spin1jcm: steady states, photon statistics and resonance
// structure of a driven spin-1 Jaynes-Cummings system.
#include "jcm/config.hpp"
#include "jcm/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
    std::string config;
    std::string preset;
    std::string out;
    int workers = -1;     // < 0 = leave spec value
    int fock_cutoff = 0;  // 0 = leave spec value
};

void add_common(CLI::App* cmd, CommonArgs& args, bool out_required) {
    cmd->add_option("--config", args.config, "TOML configuration file");
    cmd->add_option("--preset", args.preset, "named preset instead of --config");
    auto* out = cmd->add_option("--out", args.out, "output CSV path");
    if (out_required) out->required();
    cmd->add_option("--workers", args.workers, "worker thread count (0 = hardware)");
    cmd->add_option("--fock-cutoff", args.fock_cutoff, "override the Fock-space cutoff");
}

jcm::SweepSpec resolve_spec(const CommonArgs& args) {
    if (args.config.empty() == args.preset.empty())
        throw std::runtime_error("exactly one of --config or --preset is required");
    jcm::SweepSpec spec =
        args.config.empty() ? jcm::preset(args.preset) : jcm::load_spec_file(args.config);
    if (args.workers >= 0) spec.numerics.workers = args.workers;
    if (args.fock_cutoff > 0) {
        spec.numerics.fock_cutoff = args.fock_cutoff;
        spec.numerics.escalated_cutoff =
            std::max(spec.numerics.escalated_cutoff, args.fock_cutoff);
    }
    spec.validate();
    return spec;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}

void require_kind(const jcm::SweepSpec& spec, std::initializer_list<jcm::SweepKind> kinds,
                  const std::string& subcommand) {
    if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end())
        throw std::runtime_error("config kind \"" + std::string(sweep_kind_name(spec.kind)) +
                                 "\" does not match subcommand '" + subcommand + "'");
}

// out.csv -> out_n2.csv when several traces are emitted.
std::string trace_path(const std::string& base, int n, bool multiple) {
    if (!multiple) return base;
    const std::size_t dot = base.find_last_of('.');
    const std::string suffix = "_n" + std::to_string(n);
    if (dot == std::string::npos || base.find('/', dot) != std::string::npos)
        return base + suffix;
    return base.substr(0, dot) + suffix + base.substr(dot);
}

int run_sweep_cmd(const CommonArgs& args) {
    const jcm::SweepSpec spec = resolve_spec(args);
    require_kind(spec, {jcm::SweepKind::Plane, jcm::SweepKind::Line}, "sweep");
    const auto rows = jcm::run_sweep(spec);
    auto os = open_out(args.out);
    jcm::write_rows_csv(os, rows);
    std::cout << "wrote " << rows.size() << " rows to " << args.out << '\n';
    return 0;
}

int run_scan_cmd(const CommonArgs& args) {
    const jcm::SweepSpec spec = resolve_spec(args);
    require_kind(spec, {jcm::SweepKind::ScanOptimal}, "scan-optimal");
    const auto rows = jcm::scan_optimal(spec);
    auto os = open_out(args.out);
    jcm::write_scan_csv(os, rows);
    std::cout << "wrote " << rows.size() << " rows to " << args.out << '\n';
    return 0;
}

int run_resonance_cmd(const CommonArgs& args, const std::vector<int>& orders,
                      const std::vector<std::string>& branches) {
    const jcm::SweepSpec spec = resolve_spec(args);
    const double window = std::max({4.0, std::abs(spec.delta_c_over_g.from),
                                    std::abs(spec.delta_c_over_g.to)}) *
                          spec.model.g;
    std::vector<jcm::ResonanceCurve> curves;
    for (int n : orders)
        for (const std::string& b : branches)
            curves.push_back(jcm::resonance_curve(
                n, jcm::branch_from_name(b), spec.model.delta1_ratio, spec.delta2_ratio.from,
                spec.delta2_ratio.to, spec.delta2_ratio.points, spec.model.g, window));
    auto os = open_out(args.out);
    jcm::write_resonance_csv(os, curves);
    std::cout << "wrote " << curves.size() << " resonance curves to " << args.out << '\n';
    return 0;
}

int run_correlate_cmd(const CommonArgs& args) {
    const jcm::SweepSpec spec = resolve_spec(args);
    require_kind(spec, {jcm::SweepKind::Correlate}, "correlate");
    const jcm::CorrelatePointResult result = jcm::run_correlate(spec);

    const auto& s = result.summary;
    std::cout << "operating point: delta_c_over_g = " << jcm::format_number(s.delta_c_over_g)
              << ", delta2_ratio = " << jcm::format_number(s.delta2_ratio) << '\n';
    auto report = [](const char* name, const std::optional<double>& v) {
        if (v) std::cout << name << " = " << jcm::format_number(*v) << '\n';
    };
    report("n_s", s.n_s);
    report("g12_0", s.g12);
    report("g13_0", s.g13);
    report("g22_0", s.g22);

    const bool multiple = result.traces.size() > 1;
    for (const jcm::CorrelationTrace& trace : result.traces) {
        const std::string path = trace_path(args.out, trace.n, multiple);
        auto os = open_out(path);
        jcm::write_trace_csv(os, trace);
        std::cout << "wrote g_" << trace.n << "^(2)(tau) trace (" << trace.tau_grid.size()
                  << " points) to " << path << '\n';
    }
    return 0;
}

int run_preset_cmd(const std::string& name, const std::string& out, bool list) {
    if (list) {
        for (const std::string& n : jcm::preset_names()) std::cout << n << '\n';
        return 0;
    }
    if (name.empty()) throw std::runtime_error("preset: a name is required (or use --list)");
    const std::string toml = jcm::spec_to_toml(jcm::preset(name));
    if (out.empty()) {
        std::cout << toml;
    } else {
        auto os = open_out(out);
        os << toml;
        std::cout << "wrote preset '" << name << "' to " << out << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "spin1jcm — steady states, photon statistics and resonance structure of a "
        "driven spin-1 Jaynes-Cummings system"};
    app.require_subcommand(1);

    CommonArgs sweep_args, scan_args, res_args, corr_args;
    std::vector<int> res_orders{1, 2};
    std::vector<std::string> res_branches{"minus", "plus"};
    std::string preset_name, preset_out;
    bool preset_list = false;

    auto* sweep = app.add_subcommand("sweep", "grid sweep over (Delta_c, delta_2)");
    add_common(sweep, sweep_args, true);

    auto* scan = app.add_subcommand("scan-optimal",
                                    "per-delta_2 minimization of g_1^(2)(0) over Delta_c");
    add_common(scan, scan_args, true);

    auto* res = app.add_subcommand("resonance",
                                   "analytic n-photon resonance curves over delta_2");
    add_common(res, res_args, true);
    res->add_option("--n", res_orders, "photon orders (default 1 2)");
    res->add_option("--branch", res_branches, "branches: minus zero plus (default minus plus)");

    auto* corr = app.add_subcommand("correlate",
                                    "delay traces g_n^(2)(tau) at one operating point");
    add_common(corr, corr_args, true);

    auto* pre = app.add_subcommand("preset", "print a named preset as TOML");
    pre->add_option("name", preset_name, "preset name");
    pre->add_option("--out", preset_out, "write TOML here instead of stdout");
    pre->add_flag("--list", preset_list, "list available preset names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) return run_sweep_cmd(sweep_args);
        if (scan->parsed()) return run_scan_cmd(scan_args);
        if (res->parsed()) return run_resonance_cmd(res_args, res_orders, res_branches);
        if (corr->parsed()) return run_correlate_cmd(corr_args);
        if (pre->parsed()) return run_preset_cmd(preset_name, preset_out, preset_list);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
