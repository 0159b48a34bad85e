#include "jcm/steady.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <cmath>
#include <random>
#include <sstream>

namespace jcm {

DenseVector vectorize(const DenseMatrix& m) {
    return Eigen::Map<const DenseVector>(m.data(), m.size());
}

DenseMatrix unvectorize(const DenseVector& v, int dim) {
    if (v.size() != Eigen::Index(dim) * dim)
        throw std::invalid_argument("unvectorize: length is not dim^2");
    return Eigen::Map<const DenseMatrix>(v.data(), dim, dim);
}

namespace {

// Sparse Kronecker product in the same column-major layout Eigen::Map uses
// for vectorization: (A ⊗ B)(i_a*rb + i_b, j_a*cb + j_b) = A(i_a,j_a) B(i_b,j_b).
SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Triplet> trips;
    trips.reserve(size_t(a.nonZeros()) * b.nonZeros());
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (SparseMatrix::InnerIterator ita(a, ka); ita; ++ita)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (SparseMatrix::InnerIterator itb(b, kb); itb; ++itb)
                    trips.emplace_back(ita.row() * b.rows() + itb.row(),
                                       ita.col() * b.cols() + itb.col(),
                                       ita.value() * itb.value());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

SparseMatrix sparse_identity(int dim) {
    SparseMatrix id(dim, dim);
    id.setIdentity();
    return id;
}

}  // namespace

Superoperator build_liouvillian(const SparseOperator& h,
                                const std::vector<CollapseChannel>& channels) {
    if (!h.is_hermitian(1e-10 * std::max(1.0, h.max_abs())))
        throw std::invalid_argument("build_liouvillian: Hamiltonian is not Hermitian");
    for (const auto& c : channels)
        if (c.rate < 0) throw std::invalid_argument("build_liouvillian: negative rate");

    const int dim = h.dim();
    const SparseMatrix id = sparse_identity(dim);
    const SparseMatrix& hm = h.matrix();
    const SparseMatrix ht = hm.transpose();

    SparseMatrix l = Complex(0, -1) * (sparse_kron(id, hm) - sparse_kron(ht, id));

    std::ostringstream provenance;
    provenance << "H";
    for (const auto& c : channels) {
        c.op.require_same_space(h);
        const SparseMatrix& o = c.op.matrix();
        const SparseMatrix o_conj = o.conjugate();
        const SparseMatrix odo = SparseMatrix(o.adjoint()) * o;
        const SparseMatrix odo_t = odo.transpose();
        l = l + Complex(c.rate / 2.0, 0) *
                    (2.0 * sparse_kron(o_conj, o) - sparse_kron(id, odo) - sparse_kron(odo_t, id));
        provenance << "+" << c.label;
    }
    l.prune([](Eigen::Index, Eigen::Index, const Complex& v) {
        return std::abs(v) > kDropTolerance;
    });
    l.makeCompressed();
    return Superoperator{h.space(), std::move(l), provenance.str()};
}

SteadyStateResult steady_state(const Superoperator& l, const SteadyStateOptions& opts) {
    const int dim = l.hilbert_dim();
    const int vdim = l.dim();

    // Replace the equation for the (0,0) diagonal with Σ_i rho_ii = 1. In the
    // column-stacking layout the (i,i) entry sits at vectorized index i*dim+i.
    std::vector<Triplet> trips;
    trips.reserve(l.matrix.nonZeros() + dim);
    for (int k = 0; k < l.matrix.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(l.matrix, k); it; ++it)
            if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < dim; ++i) trips.emplace_back(0, i * dim + i, 1.0);
    SparseMatrix a(vdim, vdim);
    a.setFromTriplets(trips.begin(), trips.end());
    a.makeCompressed();

    Eigen::SparseLU<SparseMatrix> solver;
    solver.compute(a);
    if (solver.info() != Eigen::Success)
        throw SteadyStateError(SteadyStateError::Kind::NonUnique,
                               "steady_state: factorization failed (degenerate null space?)");

    DenseVector rhs = DenseVector::Zero(vdim);
    rhs(0) = 1.0;
    DenseVector v = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !v.allFinite())
        throw SteadyStateError(SteadyStateError::Kind::NotConverged,
                               "steady_state: linear solve failed");

    // A second null vector makes the pinned system (near-)singular; probe with
    // a random right-hand side reusing the factorization.
    {
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        DenseVector probe(vdim);
        for (int i = 0; i < vdim; ++i) probe(i) = Complex(uni(rng), uni(rng));
        probe /= probe.norm();
        DenseVector z = solver.solve(probe);
        if (!z.allFinite() || z.norm() > opts.singular_probe)
            throw SteadyStateError(
                SteadyStateError::Kind::NonUnique,
                "steady_state: null space is degenerate (steady state not unique)");
    }

    DenseMatrix rho = unvectorize(v, dim);
    rho = DenseMatrix((rho + rho.adjoint().eval()) / 2.0);  // strip numerical asymmetry
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-6)
        throw SteadyStateError(SteadyStateError::Kind::NotConverged,
                               "steady_state: trace constraint violated");
    rho /= tr;

    SteadyStateResult result;
    result.rho = DensityMatrix{l.space, rho};

    const DenseVector residual = l.matrix * vectorize(rho);
    result.residual_max = residual.cwiseAbs().maxCoeff();
    if (result.residual_max > opts.residual_tol)
        throw SteadyStateError(SteadyStateError::Kind::NotConverged,
                               "steady_state: residual " + std::to_string(result.residual_max) +
                                   " above tolerance");

    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho, Eigen::EigenvaluesOnly);
    result.min_eigenvalue = es.eigenvalues().minCoeff();

    const auto dist = photon_distribution(result.rho);
    result.cutoff_population = dist.p(dist.p.size() - 1);
    result.truncation_suspect = result.cutoff_population > opts.truncation_tol;
    return result;
}

Complex expectation(const DensityMatrix& rho, const SparseOperator& op) {
    if (op.space() != rho.space)
        throw std::invalid_argument("expectation: operator and state live on different spaces");
    return (op.matrix() * rho.matrix).eval().trace();
}

double photon_number(const DensityMatrix& rho) {
    double n = 0;
    const auto& space = rho.space;
    for (int q = 0; q <= space.fock_cutoff; ++q)
        for (int s = 0; s < space.spin_dim; ++s) {
            const int idx = space.index_of(q, s);
            n += q * rho.matrix(idx, idx).real();
        }
    return n;
}

PhotonDistribution photon_distribution(const DensityMatrix& rho) {
    const auto& space = rho.space;
    PhotonDistribution dist;
    dist.p = Eigen::VectorXd::Zero(space.fock_dim());
    for (int q = 0; q <= space.fock_cutoff; ++q)
        for (int s = 0; s < space.spin_dim; ++s) {
            const int idx = space.index_of(q, s);
            dist.p(q) += rho.matrix(idx, idx).real();
        }
    for (int q = 0; q <= space.fock_cutoff; ++q) dist.n_s += q * dist.p(q);
    if (dist.n_s >= 1e-14) {
        Eigen::VectorXd pt(space.fock_dim());
        for (int q = 0; q <= space.fock_cutoff; ++q) pt(q) = q * dist.p(q) / dist.n_s;
        dist.ptilde = pt;
    }
    return dist;
}

double falling_factorial_moment(const DensityMatrix& rho, int m) {
    if (m < 0) throw std::invalid_argument("falling_factorial_moment: m must be >= 0");
    const auto dist = photon_distribution(rho);
    double acc = 0;
    for (int q = m; q < dist.p.size(); ++q) {
        double w = 1;
        for (int j = 0; j < m; ++j) w *= double(q - j);
        acc += w * dist.p(q);
    }
    return acc;
}

std::optional<double> equal_time_g(const DensityMatrix& rho, int n, int k) {
    if (n < 1 || k < 2)
        throw std::invalid_argument("equal_time_g: need n >= 1 and k >= 2");
    // Negative moments can only be eigenvalue noise of rho; clamp them.
    const double denom = std::max(0.0, falling_factorial_moment(rho, n));
    if (denom < 1e-30) return std::nullopt;
    const double numer = std::max(0.0, falling_factorial_moment(rho, n * k));
    return numer / std::pow(denom, k);
}

}  // namespace jcm
