#include "jcm/twotime.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace jcm {

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 4th-order error weights (b - b_hat)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

class Dopri5 {
public:
    Dopri5(const SparseMatrix& l, double abs_tol, double rel_tol)
        : l_(l), abs_tol_(abs_tol), rel_tol_(rel_tol) {}

    void integrate(DenseVector& y, double t0, double t1) const {
        if (t1 <= t0) return;
        double t = t0;
        double h = initial_step(y, t1 - t0);
        DenseVector k1 = l_ * y;
        int rejected_in_a_row = 0;
        while (t < t1) {
            h = std::min(h, t1 - t);
            if (h < 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegrationFailure("Dopri5: step size underflow", t, h);

            DenseVector k2 = l_ * (y + h * a21 * k1);
            DenseVector k3 = l_ * (y + h * (a31 * k1 + a32 * k2));
            DenseVector k4 = l_ * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            DenseVector k5 = l_ * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            DenseVector k6 =
                l_ * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            DenseVector ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            DenseVector k7 = l_ * ynew;  // FSAL
            DenseVector err =
                h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double ratio = 0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double scale =
                    abs_tol_ + rel_tol_ * std::max(std::abs(y(i)), std::abs(ynew(i)));
                ratio = std::max(ratio, std::abs(err(i)) / scale);
            }
            if (ratio <= 1.0) {
                t += h;
                y.swap(ynew);
                k1.swap(k7);
                rejected_in_a_row = 0;
            } else if (++rejected_in_a_row > 50) {
                throw IntegrationFailure("Dopri5: repeated step rejection", t, h);
            }
            const double factor = ratio > 0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
            h *= std::clamp(factor, 0.2, 5.0);
        }
    }

private:
    double initial_step(const DenseVector& y, double span) const {
        // Crude spectral scale from the infinity norm of L.
        double row_max = 0;
        DenseVector row_sums = DenseVector::Zero(l_.rows());
        for (int k = 0; k < l_.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(l_, k); it; ++it)
                row_sums(it.row()) += std::abs(it.value());
        row_max = row_sums.real().maxCoeff();
        double h = row_max > 0 ? 0.1 / row_max : span;
        (void)y;
        return std::min(h, span);
    }

    const SparseMatrix& l_;
    double abs_tol_;
    double rel_tol_;
};

}  // namespace

Propagator::Propagator(Superoperator l, PropagatorOptions opts)
    : l_(std::move(l)), opts_(opts) {
    if (opts_.abs_tol <= 0 || opts_.rel_tol <= 0)
        throw std::invalid_argument("Propagator: tolerances must be positive");
}

DenseVector Propagator::evolve_vec(const DenseVector& v0, double t) const {
    if (t < 0) throw std::invalid_argument("Propagator::evolve_vec: t must be >= 0");
    if (v0.size() != l_.dim())
        throw std::invalid_argument("Propagator::evolve_vec: dimension mismatch");
    if (t == 0) return v0;
    if (opts_.method == IntegratorMethod::DenseExpm) {
        DenseMatrix lt = DenseMatrix(l_.matrix) * Complex(t, 0);
        return lt.exp() * v0;
    }
    DenseVector y = v0;
    Dopri5(l_.matrix, opts_.abs_tol, opts_.rel_tol).integrate(y, 0.0, t);
    return y;
}

DensityMatrix Propagator::evolve(const DensityMatrix& rho0, double t) const {
    if (rho0.space != l_.space)
        throw std::invalid_argument("Propagator::evolve: state lives on a different space");
    DenseVector v = evolve_vec(vectorize(rho0.matrix), t);
    return DensityMatrix{rho0.space, unvectorize(v, l_.hilbert_dim())};
}

std::vector<double> default_tau_grid() {
    std::vector<double> grid;
    grid.reserve(201);
    grid.push_back(0.0);
    const double lo = std::log(2e-3), hi = std::log(20.0);
    for (int i = 0; i < 200; ++i) grid.push_back(std::exp(lo + (hi - lo) * i / 199.0));
    return grid;
}

CorrelationTrace g2_tau(const Propagator& prop, const DensityMatrix& rho_s, int n,
                        const std::vector<double>& tau_grid) {
    if (n < 1) throw std::invalid_argument("g2_tau: n must be >= 1");
    for (double tau : tau_grid)
        if (tau < 0) throw std::invalid_argument("g2_tau: delays must be nonnegative");

    const double denom = falling_factorial_moment(rho_s, n);
    if (denom < 1e-30)
        throw std::runtime_error("g2_tau: correlation undefined (vacuum-dominated denominator)");

    const HilbertSpace& space = rho_s.space;
    SparseMatrix an = fock_annihilation(space).matrix();
    for (int i = 1; i < n; ++i) an = SparseMatrix(an * fock_annihilation(space).matrix());

    // rho' = a^n rho_s (a†)^n, evolved unnormalized.
    DenseMatrix reduced = an * rho_s.matrix * an.adjoint();

    std::vector<size_t> order(tau_grid.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return tau_grid[a] < tau_grid[b]; });

    CorrelationTrace trace;
    trace.n = n;
    trace.tau_grid = tau_grid;
    trace.values.assign(tau_grid.size(), 0.0);

    DenseVector v = vectorize(reduced);
    double t_now = 0.0;
    for (size_t idx : order) {
        const double tau = tau_grid[idx];
        if (tau > t_now) {
            v = prop.evolve_vec(v, tau - t_now);
            t_now = tau;
        }
        const DensityMatrix evolved{space, unvectorize(v, space.total_dim())};
        const double numer = falling_factorial_moment(evolved, n);
        double value = numer / (denom * denom);
        if (value < 0 && value > -1e-12) value = 0;  // integrator noise
        trace.values[idx] = value;
    }
    return trace;
}

}  // namespace jcm
