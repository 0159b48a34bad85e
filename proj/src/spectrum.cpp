#include "jcm/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace jcm {

DressedBlock dressed_block(int n, double delta_c, double delta1, double delta2, double g) {
    if (n < 0) throw std::invalid_argument("dressed_block: n must be >= 0");
    DressedBlock block;
    block.n = n;
    const int size = std::min(n + 1, 3);
    block.matrix = Eigen::MatrixXd::Zero(size, size);
    if (n == 0) return block;

    block.matrix(0, 0) = n * delta_c;
    block.matrix(1, 1) = (n - 1) * delta_c + delta1 - delta2;
    block.matrix(0, 1) = block.matrix(1, 0) = std::sqrt(double(n)) * g;
    if (n >= 2) {
        block.matrix(2, 2) = (n - 2) * delta_c + 2 * delta1;
        block.matrix(1, 2) = block.matrix(2, 1) = std::sqrt(double(n - 1)) * g;
    }
    return block;
}

Eigen::VectorXd dressed_eigenvalues(const DressedBlock& block) {
    if (block.matrix.rows() == 1) return block.matrix.diagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block.matrix);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("dressed_eigenvalues: eigensolve failed");
    return solver.eigenvalues();
}

BranchEnergies closed_form_energies(int n, double delta_c, double delta2, double g) {
    const double split = std::sqrt((2.0 * n - 1.0) * g * g + delta2 * delta2 / 4.0);
    BranchEnergies e;
    e.e_plus = n * delta_c - delta2 / 2.0 + split;
    e.e_zero = n * delta_c;
    e.e_minus = n * delta_c - delta2 / 2.0 - split;
    return e;
}

Eigen::Vector3d dark_state(int n) {
    if (n < 2) throw std::domain_error("dark_state: exists only for n >= 2");
    // Kernel of the Delta_c = 0 block: the amplitudes are cross-weighted by
    // the couplings sqrt(n) g and sqrt(n-1) g, as for any two-leg dark state.
    Eigen::Vector3d v;
    v << std::sqrt(double(n - 1) / (2.0 * n - 1.0)), 0.0,
        -std::sqrt(double(n) / (2.0 * n - 1.0));
    return v;
}

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::Minus: return "minus";
        case Branch::Zero: return "zero";
        case Branch::Plus: return "plus";
    }
    return "?";
}

Branch branch_from_name(const std::string& name) {
    if (name == "minus") return Branch::Minus;
    if (name == "zero") return Branch::Zero;
    if (name == "plus") return Branch::Plus;
    throw std::invalid_argument("unknown branch name: " + name);
}

namespace {

double block_det(int n, double delta1_ratio, double delta2_ratio, double g, double delta_c) {
    const DressedBlock b =
        dressed_block(n, delta_c, delta1_ratio * delta_c, delta2_ratio * delta_c, g);
    return b.matrix.determinant();
}

// Rank of the vanishing eigenvalue decides the branch: lowest -> Minus,
// highest -> Plus, interior -> Zero (the dark state at Delta_c = 0).
Branch classify_root(int n, double delta1_ratio, double delta2_ratio, double g, double root,
                     double* residual) {
    const DressedBlock b = dressed_block(n, root, delta1_ratio * root, delta2_ratio * root, g);
    const Eigen::VectorXd evals = dressed_eigenvalues(b);
    int zero_idx = 0;
    evals.cwiseAbs().minCoeff(&zero_idx);
    *residual = std::abs(evals(zero_idx));
    if (zero_idx == 0) return Branch::Minus;
    if (zero_idx == evals.size() - 1) return Branch::Plus;
    return Branch::Zero;
}

}  // namespace

std::vector<ResonanceRoot> find_resonances(int n, double delta1_ratio, double delta2_ratio,
                                           double g, double window) {
    if (n < 1) throw std::invalid_argument("find_resonances: n must be >= 1");
    if (!(window > 0)) throw std::invalid_argument("find_resonances: window must be > 0");
    if (g == 0) throw std::invalid_argument("find_resonances: g must be nonzero");

    const auto det = [&](double x) { return block_det(n, delta1_ratio, delta2_ratio, g, x); };

    // Scale on which det values count as an exact zero at a scan node.
    const double gn = std::pow(std::abs(g), std::min(n + 1, 3));
    const double node_zero_tol = 1e-12 * std::max(1.0, gn);

    constexpr int kScanPoints = 2001;  // even interval count, so 0 is a node
    std::vector<double> roots;
    double prev_x = -window;
    double prev_f = det(prev_x);
    for (int i = 1; i < kScanPoints; ++i) {
        const double x = -window + 2.0 * window * i / (kScanPoints - 1);
        const double f = det(x);
        if (std::abs(f) <= node_zero_tol) {
            if (roots.empty() || std::abs(roots.back() - x) > 1e-9 * window) roots.push_back(x);
        } else if (std::abs(prev_f) > node_zero_tol && std::signbit(f) != std::signbit(prev_f)) {
            double lo = prev_x, hi = x, flo = prev_f;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = det(mid);
                if (fm == 0) { lo = hi = mid; break; }
                if (std::signbit(fm) == std::signbit(flo)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = f;
    }

    std::sort(roots.begin(), roots.end());
    std::vector<ResonanceRoot> out;
    for (double r : roots) {
        double residual = 0;
        const Branch br = classify_root(n, delta1_ratio, delta2_ratio, g, r, &residual);
        out.push_back({r, br, residual});
    }
    return out;
}

std::optional<ResonanceRoot> resonance_frequency(int n, Branch branch, double delta1_ratio,
                                                 double delta2_ratio, double g, double window) {
    const auto roots = find_resonances(n, delta1_ratio, delta2_ratio, g, window);
    for (const auto& r : roots)
        if (r.branch == branch) return r;
    return std::nullopt;
}

ResonanceCurve resonance_curve(int n, Branch branch, double delta1_ratio, double delta2_from,
                               double delta2_to, int points, double g, double window) {
    if (points < 1) throw std::invalid_argument("resonance_curve: points must be >= 1");
    ResonanceCurve curve;
    curve.n = n;
    curve.branch = branch;
    curve.g = g;
    curve.samples.reserve(points);
    for (int i = 0; i < points; ++i) {
        const double r2 = points == 1
                              ? delta2_from
                              : delta2_from + (delta2_to - delta2_from) * i / double(points - 1);
        ResonanceSample sample{r2, std::nullopt, 0.0};
        if (auto root = resonance_frequency(n, branch, delta1_ratio, r2, g, window)) {
            sample.delta_c = root->delta_c;
            sample.residual = root->residual;
        }
        curve.samples.push_back(sample);
    }
    return curve;
}

}  // namespace jcm
