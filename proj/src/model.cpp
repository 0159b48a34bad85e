#include "jcm/model.hpp"

#include <cmath>

namespace jcm {

bool dispersive_regime_ok(const RawParams& raw, double threshold) {
    if (raw.Delta == 0) return false;
    return std::abs(raw.g1 / raw.Delta) < threshold &&
           std::abs(raw.Omega1 / raw.Delta) < threshold;
}

ModelParams effective_params(const RawParams& raw) {
    if (raw.Delta == 0)
        throw std::invalid_argument("effective_params: Delta must be nonzero");
    ModelParams p;
    p.g = -raw.g1 * raw.Omega1 / raw.Delta;
    p.delta_c = raw.Delta_c_prime - raw.g1 * raw.g1 / raw.Delta;
    p.delta1_abs = raw.Delta_m / 2.0;
    p.delta2_abs = raw.Delta_m / 2.0 - raw.Delta_r;
    return p;
}

SparseOperator build_hamiltonian(const ModelParams& p, const HilbertSpace& space,
                                 bool include_drives) {
    p.validate();
    space.validate();
    if (space.spin_dim != 3)
        throw std::invalid_argument("build_hamiltonian: spin-1 space required");

    const SparseOperator a = fock_annihilation(space);
    const SparseOperator ad = a.adjoint();
    const Spin1Operators s = spin1_operators(space);

    SparseOperator h = p.delta_c * (ad * a) + p.delta1() * s.sz + p.delta2() * (s.sz * s.sz) +
                       (p.g / std::sqrt(2.0)) * (ad * s.sm + a * s.sp);
    if (include_drives) {
        h = h + p.omega * (s.projectors[HilbertSpace::kG][HilbertSpace::kM] +
                           s.projectors[HilbertSpace::kM][HilbertSpace::kG]) +
            p.eta * (ad + a);
    }
    return h;
}

SparseOperator build_two_level_jcm(const ModelParams& p, const HilbertSpace& space) {
    p.validate();
    space.validate();
    if (space.spin_dim != 2)
        throw std::invalid_argument("build_two_level_jcm: two-level space required");

    const SparseOperator a = fock_annihilation(space);
    const SparseOperator ad = a.adjoint();
    const SparseOperator sigma_ee =
        tensor_lift(bare_projector(2, HilbertSpace::kE, HilbertSpace::kE), Factor::Spin, space);
    const SparseOperator sigma_ge =
        tensor_lift(bare_projector(2, HilbertSpace::kG, HilbertSpace::kE), Factor::Spin, space);
    const SparseOperator sigma_eg = sigma_ge.adjoint();

    return p.delta_c * (ad * a) + p.delta_c * sigma_ee +
           p.g * (ad * sigma_ge + a * sigma_eg) + p.eta * (ad + a);
}

SparseOperator excitation_number(const HilbertSpace& space) {
    space.validate();
    if (space.spin_dim != 3)
        throw std::invalid_argument("excitation_number: spin-1 space required");
    const SparseOperator a = fock_annihilation(space);
    const Spin1Operators s = spin1_operators(space);
    return a.adjoint() * a + s.sz + identity_operator(space);
}

SparseOperator u1_rotation(double theta, const HilbertSpace& space) {
    space.validate();
    if (space.spin_dim != 3)
        throw std::invalid_argument("u1_rotation: spin-1 space required");
    // a†a + S_z is diagonal, so the exponential is taken entrywise.
    std::vector<Triplet> trips;
    trips.reserve(space.total_dim());
    for (int idx = 0; idx < space.total_dim(); ++idx) {
        const int n = space.fock_of(idx);
        const int sz = space.spin_of(idx) - 1;  // (g, r, m) -> (-1, 0, +1)
        trips.emplace_back(idx, idx, std::exp(Complex(0, theta * (n + sz))));
    }
    return SparseOperator(space, trips);
}

std::vector<CollapseChannel> collapse_operators(const ModelParams& p, const HilbertSpace& space) {
    p.validate();
    space.validate();
    std::vector<CollapseChannel> channels;
    channels.push_back({fock_annihilation(space), p.kappa, "cavity_decay"});
    if (space.spin_dim == 3) {
        channels.push_back({spin1_operators(space).sm, p.gamma, "spin_lowering"});
    } else if (space.spin_dim == 2) {
        channels.push_back(
            {tensor_lift(bare_projector(2, HilbertSpace::kG, HilbertSpace::kE), Factor::Spin, space),
             p.gamma, "qubit_lowering"});
    }
    return channels;
}

}  // namespace jcm
