// steady.hpp — Vectorized Liouvillian, steady states, equal-time photon observables
#pragma once

#include "jcm/hilbert.hpp"
#include "jcm/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jcm {

// Liouvillian in the column-stacking convention, vec(A rho B) = (B^T ⊗ A) vec(rho):
//   L = -i (I⊗H - H^T⊗I) + Σ_c (rate_c/2) [2 conj(o)⊗o - I⊗(o†o) - (o†o)^T⊗I]
// Field amplitudes decay at rate/2 and populations at rate.
struct Superoperator {
    HilbertSpace space;
    SparseMatrix matrix;     // (dim², dim²)
    std::string provenance;  // Hamiltonian + channel labels

    int hilbert_dim() const { return space.total_dim(); }
    int dim() const { return space.total_dim() * space.total_dim(); }
};

struct DensityMatrix {
    HilbertSpace space;
    DenseMatrix matrix;
};

DenseVector vectorize(const DenseMatrix& m);
DenseMatrix unvectorize(const DenseVector& v, int dim);

Superoperator build_liouvillian(const SparseOperator& h, const std::vector<CollapseChannel>& channels);

class SteadyStateError : public std::runtime_error {
public:
    enum class Kind { NonUnique, NotConverged };
    SteadyStateError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct SteadyStateOptions {
    double residual_tol = 1e-10;     // max |L vec(rho)| against the unmodified L
    double truncation_tol = 1e-6;    // flag when p(N_max) exceeds this
    double singular_probe = 1e12;    // ||A^{-1} r|| beyond this implies a degenerate null space
};

struct SteadyStateResult {
    DensityMatrix rho;
    double residual_max = 0;        // max |L vec(rho)|
    double min_eigenvalue = 0;      // most negative eigenvalue of rho
    double cutoff_population = 0;   // p(N_max)
    bool truncation_suspect = false;
};

// Direct solve of L rho = 0 with the row of the (0,0) diagonal replaced by the
// trace constraint. Throws SteadyStateError on a degenerate null space or when
// the residual check against the unmodified L fails.
SteadyStateResult steady_state(const Superoperator& l, const SteadyStateOptions& opts = {});

Complex expectation(const DensityMatrix& rho, const SparseOperator& op);

// n_s = <a†a>; real up to a small imaginary residue which is checked.
double photon_number(const DensityMatrix& rho);

// p(q) = tr(|q><q| rho) summed over the spin factor;
// ptilde(q) = q p(q) / n_s (absent when n_s < 1e-14).
struct PhotonDistribution {
    Eigen::VectorXd p;
    std::optional<Eigen::VectorXd> ptilde;
    double n_s = 0;
};

PhotonDistribution photon_distribution(const DensityMatrix& rho);

// <(a†)^m a^m> via falling factorials of the photon number distribution.
double falling_factorial_moment(const DensityMatrix& rho, int m);

// g_n^(k)(0) = <(a†)^{nk} a^{nk}> / <(a†)^n a^n>^k; absent when the
// denominator is vacuum-dominated (< 1e-30).
std::optional<double> equal_time_g(const DensityMatrix& rho, int n, int k);

}  // namespace jcm
