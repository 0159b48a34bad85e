#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jcm/spectrum.hpp"
#include "jcm/steady.hpp"

#include <cmath>
#include <random>

using namespace jcm;

namespace {

DensityMatrix random_density(const HilbertSpace& space, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int dim = space.total_dim();
    DenseMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(uni(rng), uni(rng));
    DenseMatrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix{space, rho};
}

Superoperator full_model_liouvillian(int cutoff, double eta, double omega) {
    ModelParams p;
    p.g = 2.0;
    p.kappa = 1.0;
    p.gamma = 0.3;
    p.eta = eta;
    p.omega = omega;
    p.delta_c = 0.7;
    p.delta1_ratio = 0.1;
    p.delta2_ratio = -0.4;
    HilbertSpace space{cutoff, 3};
    return build_liouvillian(build_hamiltonian(p, space, true), collapse_operators(p, space));
}

SparseOperator zero_operator(const HilbertSpace& space) {
    return SparseOperator(space, std::vector<Triplet>{});
}

DensityMatrix fock_density(const HilbertSpace& space, int q) {
    DenseMatrix m = DenseMatrix::Zero(space.total_dim(), space.total_dim());
    m(space.index_of(q, 0), space.index_of(q, 0)) = 1.0;
    return DensityMatrix{space, m};
}

}  // namespace

TEST_CASE("liouvillian preserves trace and hermiticity") {
    const Superoperator l = full_model_liouvillian(3, 0.1, 0.05);
    for (unsigned seed = 1; seed <= 10; ++seed) {
        const DensityMatrix rho = random_density(l.space, seed);
        const DenseMatrix drho = unvectorize(l.matrix * vectorize(rho.matrix), l.hilbert_dim());
        CHECK(std::abs(drho.trace()) < 1e-12);
        CHECK((drho - drho.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK(l.provenance == "H+cavity_decay+spin_lowering");
    CHECK(l.dim() == 12 * 12);
}

TEST_CASE("liouvillian input validation") {
    HilbertSpace space{2, 3};
    const SparseOperator a = fock_annihilation(space);
    CHECK_THROWS_AS(build_liouvillian(a, {}), std::invalid_argument);  // not Hermitian
    const SparseOperator h = a + a.adjoint();
    CHECK_THROWS_AS(build_liouvillian(h, {{a, -1.0, "bad"}}), std::invalid_argument);
}

TEST_CASE("decay to vacuum") {
    SUBCASE("bare cavity, smallest space") {
        HilbertSpace space{1, 1};
        const Superoperator l =
            build_liouvillian(zero_operator(space), {{fock_annihilation(space), 1.0, "cavity_decay"}});
        const SteadyStateResult r = steady_state(l);
        CHECK(std::abs(r.rho.matrix(0, 0) - 1.0) < 1e-12);
        CHECK(r.rho.matrix.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("undriven full model lands in |0,g>") {
        ModelParams p;
        p.g = 2.0;
        p.kappa = 1.0;
        p.gamma = 0.3;
        p.delta_c = 0.7;
        p.delta1_ratio = 0.1;
        p.delta2_ratio = -0.4;
        HilbertSpace space{3, 3};
        const Superoperator l =
            build_liouvillian(build_hamiltonian(p, space, true), collapse_operators(p, space));
        const SteadyStateResult r = steady_state(l);

        const int idx = space.index_of(0, HilbertSpace::kG);
        CHECK(std::abs(r.rho.matrix(idx, idx) - 1.0) < 1e-10);
        CHECK(r.residual_max < 1e-10);
        CHECK(r.min_eigenvalue > -1e-8);
        CHECK_FALSE(r.truncation_suspect);

        // Density-matrix invariants.
        CHECK(std::abs(r.rho.matrix.trace() - 1.0) < 1e-10);
        CHECK((r.rho.matrix - r.rho.matrix.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-10);

        // Vacuum state: p(0) = 1 and the excitation fraction is undefined.
        const PhotonDistribution dist = photon_distribution(r.rho);
        CHECK(dist.p(0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(dist.n_s < 1e-14);
        CHECK_FALSE(dist.ptilde.has_value());
        CHECK_FALSE(equal_time_g(r.rho, 1, 2).has_value());
    }
}

TEST_CASE("driven damped cavity against the analytic amplitude equation") {
    // g = 0 decouples the spin; the cavity relaxes to a coherent state with
    // n_s = eta^2 / (Delta_c^2 + kappa^2/4).
    ModelParams p;
    p.g = 0.0;
    p.kappa = 1.0;
    p.gamma = 0.2;
    p.eta = 0.05;
    p.delta_c = 0.7;
    HilbertSpace space{8, 3};
    const Superoperator l =
        build_liouvillian(build_hamiltonian(p, space, true), collapse_operators(p, space));
    const SteadyStateResult r = steady_state(l);

    const double expect = p.eta * p.eta / (p.delta_c * p.delta_c + p.kappa * p.kappa / 4.0);
    const double n_s = photon_number(r.rho);
    CHECK(std::abs(n_s - expect) < 1e-8);

    const PhotonDistribution dist = photon_distribution(r.rho);
    CHECK(std::abs(dist.n_s - n_s) < 1e-12);
    for (int q = 0; q <= 4; ++q) {
        const double poisson = std::exp(-n_s) * std::pow(n_s, q) / std::tgamma(q + 1.0);
        CHECK(std::abs(dist.p(q) - poisson) < 1e-6);
    }
    REQUIRE(dist.ptilde.has_value());
    CHECK(dist.ptilde->sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(dist.p.sum() == doctest::Approx(1.0).epsilon(1e-10));

    // Expectation pairing agrees with the distribution route and is real for
    // a Hermitian observable.
    const SparseOperator a = fock_annihilation(space);
    const Complex na = expectation(r.rho, a.adjoint() * a);
    CHECK(std::abs(na.real() - n_s) < 1e-12);
    CHECK(std::abs(na.imag()) < 1e-12);
}

TEST_CASE("equal-time correlations on reference states") {
    HilbertSpace space{30, 1};

    SUBCASE("Fock state |2>") {
        const DensityMatrix rho = fock_density(space, 2);
        CHECK(*equal_time_g(rho, 1, 2) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(*equal_time_g(rho, 2, 2) == 0.0);
        CHECK(falling_factorial_moment(rho, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(falling_factorial_moment(rho, 1) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(falling_factorial_moment(rho, 2) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(falling_factorial_moment(rho, 3) == 0.0);
        CHECK_THROWS_AS(falling_factorial_moment(rho, -1), std::invalid_argument);
    }

    SUBCASE("coherent state factorizes at every order") {
        const double alpha = 0.5;
        DenseVector amp(space.total_dim());
        for (int q = 0; q <= 30; ++q)
            amp(q) = std::exp(-alpha * alpha / 2.0) * std::pow(alpha, q) /
                     std::sqrt(std::tgamma(q + 1.0));
        DenseMatrix m = amp * amp.adjoint();
        const DensityMatrix rho{space, m};
        for (auto [n, k] : {std::pair{1, 2}, {1, 3}, {2, 2}})
            CHECK(*equal_time_g(rho, n, k) == doctest::Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("argument validation") {
        const DensityMatrix rho = fock_density(space, 0);
        CHECK_THROWS_AS(equal_time_g(rho, 0, 2), std::invalid_argument);
        CHECK_THROWS_AS(equal_time_g(rho, 1, 1), std::invalid_argument);
        CHECK_FALSE(equal_time_g(rho, 1, 2).has_value());  // vacuum denominator
    }
}

TEST_CASE("uniqueness guard") {
    // Cavity decay alone cannot relax the qubit: two independent steady
    // states exist and the solver must refuse rather than pick one.
    HilbertSpace space{2, 2};
    const Superoperator l =
        build_liouvillian(zero_operator(space), {{fock_annihilation(space), 1.0, "cavity_decay"}});
    bool threw = false;
    try {
        steady_state(l);
    } catch (const SteadyStateError& err) {
        threw = true;
        CHECK(err.kind() == SteadyStateError::Kind::NonUnique);
    }
    CHECK(threw);
}

TEST_CASE("truncation flag on a strongly driven cavity") {
    ModelParams p;
    p.g = 0.0;
    p.kappa = 1.0;
    p.gamma = 0.2;
    p.eta = 0.6;
    p.delta_c = 0.0;
    HilbertSpace space{4, 3};
    const Superoperator l =
        build_liouvillian(build_hamiltonian(p, space, true), collapse_operators(p, space));
    const SteadyStateResult r = steady_state(l);
    CHECK(r.truncation_suspect);
    CHECK(r.cutoff_population > 1e-6);
}

TEST_CASE("expectation dimension mismatch") {
    const DensityMatrix rho = fock_density(HilbertSpace{3, 1}, 1);
    CHECK_THROWS_AS(expectation(rho, fock_annihilation(HilbertSpace{4, 1})), std::invalid_argument);
}

TEST_CASE("single-photon resonance operating point") {
    // Cavity-driven blockade point: sizable photon number and nearly all
    // excitation carried by single photons.
    ModelParams p;
    p.g = 6.0;
    p.kappa = 1.0;
    p.gamma = 0.01;
    p.eta = 0.1;
    p.delta1_ratio = 0.1;
    p.delta2_ratio = -0.4;
    const auto root = resonance_frequency(1, Branch::Minus, 0.1, -0.4, p.g, 24.0);
    REQUIRE(root.has_value());
    p.delta_c = root->delta_c;

    HilbertSpace space{10, 3};
    const Superoperator l =
        build_liouvillian(build_hamiltonian(p, space, true), collapse_operators(p, space));
    const SteadyStateResult r = steady_state(l);
    CHECK(photon_number(r.rho) > 0.03);
    const PhotonDistribution dist = photon_distribution(r.rho);
    REQUIRE(dist.ptilde.has_value());
    CHECK((*dist.ptilde)(1) > 0.99);
    CHECK(r.residual_max < 1e-10);
    CHECK(r.min_eigenvalue > -1e-8);
}
