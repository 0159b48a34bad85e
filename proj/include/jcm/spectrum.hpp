// spectrum.hpp — Dressed-state blocks, branch energies, dark states, n-photon resonances
#pragma once

#include "jcm/hilbert.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jcm {

// Hamiltonian restricted to the n-excitation subspace, on the ordered basis
// (|n,g>, |n-1,r>, |n-2,m>) truncated to existing states (2x2 for n = 1,
// 1x1 zero for n = 0). Energies are measured from the |0,g> level, so a zero
// eigenvalue marks an n-photon drive resonance.
struct DressedBlock {
    int n = 0;
    Eigen::MatrixXd matrix;  // real symmetric, size min(n+1, 3)
};

DressedBlock dressed_block(int n, double delta_c, double delta1, double delta2, double g);

// Ascending eigenvalues of the block.
Eigen::VectorXd dressed_eigenvalues(const DressedBlock& block);

// Branch energies in the delta_1 = Delta_c regime:
//   E_{n,±} = n Delta_c - delta_2/2 ± sqrt((2n-1) g² + delta_2²/4),  E_{n,0} = n Delta_c
struct BranchEnergies {
    double e_plus;
    double e_zero;
    double e_minus;
};

BranchEnergies closed_form_energies(int n, double delta_c, double delta2, double g);

// Middle-branch dark state at Delta_c = 0 (ratio convention), n >= 2:
// coordinates (sqrt((n-1)/(2n-1)), 0, -sqrt(n/(2n-1))) in the block basis,
// i.e. the unit kernel vector of the block with no |n-1,r> component.
Eigen::Vector3d dark_state(int n);

enum class Branch { Minus, Zero, Plus };

const char* branch_name(Branch b);
Branch branch_from_name(const std::string& name);

struct ResonanceRoot {
    double delta_c;   // root of det M(Delta_c) with delta_i = ratio_i * Delta_c
    Branch branch;    // rank of the vanishing eigenvalue within the block spectrum
    double residual;  // |smallest eigenvalue of M at the root|
};

// All roots of det M(Delta_c) = 0 inside |Delta_c| <= window, found by a
// 2001-point sign scan plus bisection. Delta_c = 0 is a root for every n >= 2
// (the dark state) and is reported on the Zero branch.
std::vector<ResonanceRoot> find_resonances(int n, double delta1_ratio, double delta2_ratio,
                                           double g, double window);

// Single-branch convenience; empty when no root of that branch lies in the
// window (expected near the divergence of the n = 1 resonance).
std::optional<ResonanceRoot> resonance_frequency(int n, Branch branch, double delta1_ratio,
                                                 double delta2_ratio, double g, double window);

struct ResonanceSample {
    double delta2_ratio;
    std::optional<double> delta_c;  // absent = NoRoot in the window
    double residual;                // |smallest eigenvalue| at the root, 0 when absent
};

struct ResonanceCurve {
    int n = 1;
    Branch branch = Branch::Minus;
    double g = 1;
    std::vector<ResonanceSample> samples;
};

ResonanceCurve resonance_curve(int n, Branch branch, double delta1_ratio, double delta2_from,
                               double delta2_to, int points, double g, double window);

}  // namespace jcm
