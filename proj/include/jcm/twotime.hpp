// twotime.hpp — Master-equation propagation and two-time photon correlations
#pragma once

#include "jcm/steady.hpp"

#include <vector>

namespace jcm {

class IntegrationFailure : public std::runtime_error {
public:
    IntegrationFailure(const std::string& what, double t_reached, double step)
        : std::runtime_error(what), t_reached_(t_reached), step_(step) {}
    double t_reached() const { return t_reached_; }
    double step() const { return step_; }

private:
    double t_reached_;
    double step_;
};

enum class IntegratorMethod {
    AdaptiveRK,  // embedded Dormand-Prince 5(4) on the vectorized state
    DenseExpm,   // dense exp(L t), for small systems and oracle checks
};

struct PropagatorOptions {
    IntegratorMethod method = IntegratorMethod::AdaptiveRK;
    double abs_tol = 1e-12;
    double rel_tol = 1e-9;
    double t_max = 50.0;  // advertised horizon in units of 1/kappa
};

// Immutable propagator for d(vec rho)/dt = L vec(rho). Evolution state is
// worker-local; one instance may serve concurrent sweeps.
class Propagator {
public:
    Propagator(Superoperator l, PropagatorOptions opts = {});

    const Superoperator& liouvillian() const { return l_; }
    const PropagatorOptions& options() const { return opts_; }

    // Unnormalized vectorized evolution; the trace of the evolved operator
    // carries physical weight in regression formulas.
    DenseVector evolve_vec(const DenseVector& v0, double t) const;

    DensityMatrix evolve(const DensityMatrix& rho0, double t) const;

private:
    Superoperator l_;
    PropagatorOptions opts_;
};

struct CorrelationTrace {
    int n = 1;                     // bundle order (1 or 2)
    std::vector<double> tau_grid;  // delays in units of 1/kappa
    std::vector<double> values;    // g_n^(2)(tau)
};

// tau = 0 plus 200 log-spaced delays on [2e-3, 20]/kappa.
std::vector<double> default_tau_grid();

// Quantum regression: rho' = a^n rho_s (a†)^n evolved over the sorted grid in
// a single checkpointed pass; g_n^(2)(tau) = tr[(a†)^n a^n rho'(tau)] / denom²
// with denom = tr[(a†)^n a^n rho_s]. Throws on a vacuum-dominated denominator.
CorrelationTrace g2_tau(const Propagator& prop, const DensityMatrix& rho_s, int n,
                        const std::vector<double>& tau_grid);

}  // namespace jcm
