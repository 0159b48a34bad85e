// hilbert.hpp — Truncated Fock ⊗ spin composite spaces and sparse operator algebra
#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <atomic>
#include <complex>
#include <stdexcept>
#include <vector>

namespace jcm {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

// Entries with |value| below this are dropped when operators are assembled.
inline constexpr double kDropTolerance = 1e-15;

// --------------------------- Composite Hilbert space ------------------------
//
// Basis ordering is Fock-major: index = fock * spin_dim + spin, with the
// spin-1 levels ordered (g, r, m) and the two-level reference ordered (g, e).

struct HilbertSpace {
    int fock_cutoff = 1;  // max photon number N_max; Fock dimension N_max + 1
    int spin_dim = 3;     // 3 = spin-1 {g,r,m}, 2 = two-level {g,e}, 1 = cavity only

    // spin-1 level indices
    static constexpr int kG = 0;
    static constexpr int kR = 1;
    static constexpr int kM = 2;
    // two-level indices
    static constexpr int kE = 1;

    int fock_dim() const { return fock_cutoff + 1; }
    int total_dim() const { return fock_dim() * spin_dim; }

    int index_of(int fock, int spin) const {
        if (fock < 0 || fock > fock_cutoff || spin < 0 || spin >= spin_dim)
            throw std::out_of_range("HilbertSpace::index_of: basis label out of range");
        return fock * spin_dim + spin;
    }
    int fock_of(int index) const { return index / spin_dim; }
    int spin_of(int index) const { return index % spin_dim; }

    bool operator==(const HilbertSpace& o) const {
        return fock_cutoff == o.fock_cutoff && spin_dim == o.spin_dim;
    }
    bool operator!=(const HilbertSpace& o) const { return !(*this == o); }

    void validate() const {
        if (fock_cutoff < 1) throw std::invalid_argument("HilbertSpace: fock_cutoff must be >= 1");
        if (spin_dim < 1 || spin_dim > 3) throw std::invalid_argument("HilbertSpace: spin_dim must be 1, 2 or 3");
    }
};

// --------------------------- Sparse operator --------------------------------
//
// Immutable after construction; algebra returns new operators. The hermiticity
// flag is computed on demand and cached atomically so shared instances stay
// safe across sweep workers.

class SparseOperator {
public:
    SparseOperator() = default;

    SparseOperator(HilbertSpace space, SparseMatrix mat)
        : space_(space), mat_(std::move(mat)) {
        if (mat_.rows() != space_.total_dim() || mat_.cols() != space_.total_dim())
            throw std::invalid_argument("SparseOperator: matrix does not match space dimension");
        mat_.prune([](Eigen::Index, Eigen::Index, const Complex& v) {
            return std::abs(v) > kDropTolerance;
        });
        mat_.makeCompressed();
    }

    SparseOperator(HilbertSpace space, const std::vector<Triplet>& entries)
        : SparseOperator(space, fromTriplets(space, entries)) {}

    SparseOperator(const SparseOperator& o)
        : space_(o.space_), mat_(o.mat_), hermitian_(o.hermitian_.load()) {}
    SparseOperator& operator=(const SparseOperator& o) {
        space_ = o.space_;
        mat_ = o.mat_;
        hermitian_.store(o.hermitian_.load());
        return *this;
    }
    SparseOperator(SparseOperator&& o) noexcept
        : space_(o.space_), mat_(std::move(o.mat_)), hermitian_(o.hermitian_.load()) {}
    SparseOperator& operator=(SparseOperator&& o) noexcept {
        space_ = o.space_;
        mat_ = std::move(o.mat_);
        hermitian_.store(o.hermitian_.load());
        return *this;
    }

    const HilbertSpace& space() const { return space_; }
    const SparseMatrix& matrix() const { return mat_; }
    int dim() const { return space_.total_dim(); }

    SparseOperator adjoint() const {
        return SparseOperator(space_, SparseMatrix(mat_.adjoint()));
    }

    bool is_hermitian(double tol = 1e-12) const;

    DenseMatrix dense() const { return DenseMatrix(mat_); }

    // Largest |entry| of the difference, used all over the tests.
    double max_abs_diff(const SparseOperator& other) const {
        require_same_space(other);
        DenseMatrix d = DenseMatrix(mat_) - DenseMatrix(other.mat_);
        return d.cwiseAbs().maxCoeff();
    }

    double max_abs() const {
        double m = 0;
        for (int k = 0; k < mat_.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(mat_, k); it; ++it)
                m = std::max(m, std::abs(it.value()));
        return m;
    }

    void require_same_space(const SparseOperator& other) const {
        if (space_ != other.space_)
            throw std::invalid_argument("SparseOperator: operands live on different spaces");
    }

private:
    static SparseMatrix fromTriplets(const HilbertSpace& space, const std::vector<Triplet>& entries);

    HilbertSpace space_;
    SparseMatrix mat_;
    mutable std::atomic<int> hermitian_{-1};  // -1 unknown, 0 no, 1 yes
};

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(Complex s, const SparseOperator& a);
inline SparseOperator operator*(const SparseOperator& a, Complex s) { return s * a; }
inline SparseOperator operator*(double s, const SparseOperator& a) { return Complex(s, 0) * a; }

// --------------------------- State vectors ----------------------------------

struct StateVector {
    HilbertSpace space;
    DenseVector amplitudes;

    double norm() const { return amplitudes.norm(); }
    StateVector normalized() const {
        StateVector s{space, amplitudes / amplitudes.norm()};
        return s;
    }
};

StateVector basis_state(const HilbertSpace& space, int fock, int spin);

// --------------------------- Factor operators --------------------------------

// Bare single-factor matrices (dense; factors are at most a few tens wide).
DenseMatrix bare_fock_annihilation(int fock_dim);
DenseMatrix bare_projector(int dim, int i, int j);  // |i><j|
DenseMatrix bare_spin1_sz();
DenseMatrix bare_spin1_sminus();

enum class Factor { Fock, Spin };

// Kronecker lift of a single-factor operator onto the composite space.
SparseOperator tensor_lift(const DenseMatrix& op, Factor which, const HilbertSpace& target);

SparseOperator identity_operator(const HilbertSpace& space);

// Cavity annihilation a ⊗ 1 with the truncation a|N_max> = sqrt(N_max)|N_max-1>.
SparseOperator fock_annihilation(const HilbertSpace& space);

struct Spin1Operators {
    SparseOperator sz;
    SparseOperator sp;
    SparseOperator sm;
    // projectors[i][j] = |i><j| lifted, i,j in (g, r, m)
    std::vector<std::vector<SparseOperator>> projectors;
};

Spin1Operators spin1_operators(const HilbertSpace& space);

}  // namespace jcm
