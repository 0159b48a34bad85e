// model.hpp — Spin-1 JCM Hamiltonian, drives, collapse channels, symmetry operators
#pragma once

#include "jcm/hilbert.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jcm {

// All rates and detunings are in units of the cavity decay kappa. The linear
// and quadratic Zeeman shifts are specified as ratios delta_i / Delta_c and
// co-vary with Delta_c during sweeps; absolute overrides exist for tests.
struct ModelParams {
    double g = 0.0;        // effective atom-cavity coupling
    double kappa = 1.0;    // cavity decay, the energy unit
    double gamma = 0.0;    // atomic decay of the ground-manifold spin
    double eta = 0.0;      // cavity drive amplitude
    double omega = 0.0;    // atom pump Rabi frequency (g <-> m)
    double delta_c = 0.0;  // cavity-light detuning

    double delta1_ratio = 0.0;  // delta_1 / Delta_c
    double delta2_ratio = 0.0;  // delta_2 / Delta_c
    std::optional<double> delta1_abs;  // absolute override
    std::optional<double> delta2_abs;

    double delta1() const { return delta1_abs ? *delta1_abs : delta1_ratio * delta_c; }
    double delta2() const { return delta2_abs ? *delta2_abs : delta2_ratio * delta_c; }

    void validate() const {
        if (kappa <= 0) throw std::invalid_argument("ModelParams: kappa must be > 0");
        if (gamma < 0) throw std::invalid_argument("ModelParams: gamma must be >= 0");
    }
};

// Bare parameters of the driven three-level system before adiabatic
// elimination of the excited states.
struct RawParams {
    double g1 = 0.0;             // bare atom-cavity coupling
    double Omega1 = 0.0;         // classical Raman pump Rabi frequency
    double Delta = 0.0;          // atom-cavity detuning (large, dispersive)
    double Delta_c_prime = 0.0;  // bare cavity-light detuning
    double Delta_r = 0.0;        // one-photon detuning
    double Delta_m = 0.0;        // two-photon detuning
};

// Dispersive-regime sanity flag: |g1/Delta| and |Omega1/Delta| should be small.
bool dispersive_regime_ok(const RawParams& raw, double threshold = 0.1);

// g = -g1 Omega1 / Delta, Delta_c = Delta_c' - g1^2/Delta,
// delta_1 = Delta_m/2, delta_2 = Delta_m/2 - Delta_r (absolute overrides set).
ModelParams effective_params(const RawParams& raw);

// H = Delta_c a†a + delta_1 S_z + delta_2 S_z² + (g/√2)(a† S_- + a S_+)
//   [+ Omega (sigma_gm + sigma_mg) + eta (a† + a) when drives are included]
SparseOperator build_hamiltonian(const ModelParams& p, const HilbertSpace& space,
                                 bool include_drives);

// Two-level reference with the qubit on cavity resonance:
// H = Delta_c a†a + Delta_c sigma_ee + g (a† sigma_ge + a sigma_eg) + eta (a† + a)
SparseOperator build_two_level_jcm(const ModelParams& p, const HilbertSpace& space);

// N = a†a + S_z + 1 (conserved by the undriven Hamiltonian)
SparseOperator excitation_number(const HilbertSpace& space);

// R_theta = exp[i theta (a†a + S_z)], diagonal in the product basis
SparseOperator u1_rotation(double theta, const HilbertSpace& space);

struct CollapseChannel {
    SparseOperator op;
    double rate;
    std::string label;
};

// (a, kappa) and the spin lowering channel (S_- or sigma_ge, gamma); rates
// enter the master equation through (rate/2) D[op].
std::vector<CollapseChannel> collapse_operators(const ModelParams& p, const HilbertSpace& space);

}  // namespace jcm
