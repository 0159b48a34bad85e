#include "jcm/hilbert.hpp"

#include <cmath>

namespace jcm {

SparseMatrix SparseOperator::fromTriplets(const HilbertSpace& space, const std::vector<Triplet>& entries) {
    const int dim = space.total_dim();
    for (const auto& t : entries) {
        if (t.row() < 0 || t.row() >= dim || t.col() < 0 || t.col() >= dim)
            throw std::out_of_range("SparseOperator: entry index outside the space");
    }
    SparseMatrix m(dim, dim);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

bool SparseOperator::is_hermitian(double tol) const {
    int cached = hermitian_.load(std::memory_order_relaxed);
    if (cached >= 0) return cached == 1;
    SparseMatrix diff = SparseMatrix(mat_.adjoint()) - mat_;
    double worst = 0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    const bool herm = worst <= tol;
    hermitian_.store(herm ? 1 : 0, std::memory_order_relaxed);
    return herm;
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
    a.require_same_space(b);
    return SparseOperator(a.space(), SparseMatrix(a.matrix() + b.matrix()));
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
    a.require_same_space(b);
    return SparseOperator(a.space(), SparseMatrix(a.matrix() - b.matrix()));
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
    a.require_same_space(b);
    return SparseOperator(a.space(), SparseMatrix(a.matrix() * b.matrix()));
}

SparseOperator operator*(Complex s, const SparseOperator& a) {
    return SparseOperator(a.space(), SparseMatrix(s * a.matrix()));
}

StateVector basis_state(const HilbertSpace& space, int fock, int spin) {
    DenseVector v = DenseVector::Zero(space.total_dim());
    v(space.index_of(fock, spin)) = 1.0;
    return StateVector{space, std::move(v)};
}

DenseMatrix bare_fock_annihilation(int fock_dim) {
    if (fock_dim < 2) throw std::invalid_argument("bare_fock_annihilation: need fock_dim >= 2");
    DenseMatrix a = DenseMatrix::Zero(fock_dim, fock_dim);
    for (int n = 1; n < fock_dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

DenseMatrix bare_projector(int dim, int i, int j) {
    if (i < 0 || i >= dim || j < 0 || j >= dim)
        throw std::out_of_range("bare_projector: index out of range");
    DenseMatrix p = DenseMatrix::Zero(dim, dim);
    p(i, j) = 1.0;
    return p;
}

DenseMatrix bare_spin1_sz() {
    // S_z = sigma_mm - sigma_gg on the (g, r, m) ordering
    return bare_projector(3, HilbertSpace::kM, HilbertSpace::kM) -
           bare_projector(3, HilbertSpace::kG, HilbertSpace::kG);
}

DenseMatrix bare_spin1_sminus() {
    // S_- = sqrt(2) (sigma_gr + sigma_rm)
    return std::sqrt(2.0) * (bare_projector(3, HilbertSpace::kG, HilbertSpace::kR) +
                             bare_projector(3, HilbertSpace::kR, HilbertSpace::kM));
}

SparseOperator tensor_lift(const DenseMatrix& op, Factor which, const HilbertSpace& target) {
    target.validate();
    const int fd = target.fock_dim();
    const int sd = target.spin_dim;
    std::vector<Triplet> trips;
    if (which == Factor::Fock) {
        if (op.rows() != fd || op.cols() != fd)
            throw std::invalid_argument("tensor_lift: operator does not match the Fock factor");
        trips.reserve(size_t(op.size()) * sd);
        for (int i = 0; i < fd; ++i)
            for (int j = 0; j < fd; ++j) {
                const Complex v = op(i, j);
                if (std::abs(v) <= kDropTolerance) continue;
                for (int s = 0; s < sd; ++s)
                    trips.emplace_back(i * sd + s, j * sd + s, v);
            }
    } else {
        if (op.rows() != sd || op.cols() != sd)
            throw std::invalid_argument("tensor_lift: operator does not match the spin factor");
        trips.reserve(size_t(op.size()) * fd);
        for (int s = 0; s < sd; ++s)
            for (int t = 0; t < sd; ++t) {
                const Complex v = op(s, t);
                if (std::abs(v) <= kDropTolerance) continue;
                for (int n = 0; n < fd; ++n)
                    trips.emplace_back(n * sd + s, n * sd + t, v);
            }
    }
    return SparseOperator(target, trips);
}

SparseOperator identity_operator(const HilbertSpace& space) {
    space.validate();
    std::vector<Triplet> trips;
    trips.reserve(space.total_dim());
    for (int i = 0; i < space.total_dim(); ++i) trips.emplace_back(i, i, 1.0);
    return SparseOperator(space, trips);
}

SparseOperator fock_annihilation(const HilbertSpace& space) {
    space.validate();
    return tensor_lift(bare_fock_annihilation(space.fock_dim()), Factor::Fock, space);
}

Spin1Operators spin1_operators(const HilbertSpace& space) {
    space.validate();
    if (space.spin_dim != 3)
        throw std::invalid_argument("spin1_operators: space is not spin-1");
    Spin1Operators ops;
    ops.sz = tensor_lift(bare_spin1_sz(), Factor::Spin, space);
    ops.sm = tensor_lift(bare_spin1_sminus(), Factor::Spin, space);
    ops.sp = ops.sm.adjoint();
    ops.projectors.resize(3);
    for (int i = 0; i < 3; ++i) {
        ops.projectors[i].reserve(3);
        for (int j = 0; j < 3; ++j)
            ops.projectors[i].push_back(tensor_lift(bare_projector(3, i, j), Factor::Spin, space));
    }
    return ops;
}

}  // namespace jcm
