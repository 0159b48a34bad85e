#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jcm/model.hpp"
#include "jcm/spectrum.hpp"

#include <cmath>
#include <random>

using namespace jcm;

namespace {

// Positive resonance of the n-excitation block under the ratio convention,
// from det M = 0 solved by hand.
double analytic_root(int n, double r1, double r2) {
    if (n == 1) return 1.0 / std::sqrt(r1 - r2);
    return std::sqrt((1.0 + 2.0 * r1) / (2.0 * r1 * (1.0 + r1 - r2)));
}

}  // namespace

TEST_CASE("dressed block entries") {
    SUBCASE("n = 0 is the scalar zero") {
        const DressedBlock b = dressed_block(0, 0.7, 0.1, -0.2, 2.0);
        REQUIRE(b.matrix.rows() == 1);
        CHECK(b.matrix(0, 0) == 0.0);
    }
    SUBCASE("n = 1 couples |1,g> and |0,r>") {
        const DressedBlock b = dressed_block(1, 0.7, 0.07, -0.28, 2.0);
        REQUIRE(b.matrix.rows() == 2);
        CHECK(b.matrix(0, 0) == doctest::Approx(0.7).epsilon(1e-14));
        CHECK(b.matrix(1, 1) == doctest::Approx(0.07 + 0.28).epsilon(1e-14));
        CHECK(b.matrix(0, 1) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(b.matrix(1, 0) == b.matrix(0, 1));
    }
    SUBCASE("n >= 2 is tridiagonal with sqrt(n), sqrt(n-1) couplings") {
        const double dc = 0.7, d1 = 0.07, d2 = -0.28, g = 2.0;
        for (int n = 2; n <= 5; ++n) {
            const DressedBlock b = dressed_block(n, dc, d1, d2, g);
            REQUIRE(b.matrix.rows() == 3);
            CHECK(b.matrix(0, 0) == doctest::Approx(n * dc).epsilon(1e-14));
            CHECK(b.matrix(1, 1) == doctest::Approx((n - 1) * dc + d1 - d2).epsilon(1e-14));
            CHECK(b.matrix(2, 2) == doctest::Approx((n - 2) * dc + 2 * d1).epsilon(1e-14));
            CHECK(b.matrix(0, 1) == doctest::Approx(std::sqrt(double(n)) * g).epsilon(1e-14));
            CHECK(b.matrix(1, 2) == doctest::Approx(std::sqrt(double(n - 1)) * g).epsilon(1e-14));
            CHECK(b.matrix(0, 2) == 0.0);
        }
    }
    CHECK_THROWS_AS(dressed_block(-1, 0, 0, 0, 1), std::invalid_argument);
}

TEST_CASE("eigenvalues of the bare coupling blocks") {
    const double g = 1.3;
    const Eigen::VectorXd e1 = dressed_eigenvalues(dressed_block(1, 0, 0, 0, g));
    CHECK(e1(0) == doctest::Approx(-g).epsilon(1e-12));
    CHECK(e1(1) == doctest::Approx(g).epsilon(1e-12));

    const Eigen::VectorXd e2 = dressed_eigenvalues(dressed_block(2, 0, 0, 0, g));
    CHECK(e2(0) == doctest::Approx(-std::sqrt(3.0) * g).epsilon(1e-12));
    CHECK(std::abs(e2(1)) < 1e-12);
    CHECK(e2(2) == doctest::Approx(std::sqrt(3.0) * g).epsilon(1e-12));
}

TEST_CASE("closed-form branch energies match the eigensolver at delta_1 = Delta_c") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    std::uniform_real_distribution<double> gdist(0.5, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + int(rng() % 6);
        const double dc = uni(rng), d2 = uni(rng), g = gdist(rng);
        const BranchEnergies e = closed_form_energies(n, dc, d2, g);
        const Eigen::VectorXd ev = dressed_eigenvalues(dressed_block(n, dc, dc, d2, g));
        if (n == 1) {
            CHECK(std::abs(ev(0) - e.e_minus) < 1e-12);
            CHECK(std::abs(ev(1) - e.e_plus) < 1e-12);
        } else {
            CHECK(std::abs(ev(0) - e.e_minus) < 1e-12);
            CHECK(std::abs(ev(1) - e.e_zero) < 1e-12);
            CHECK(std::abs(ev(2) - e.e_plus) < 1e-12);
        }
        // The middle branch sits at n Delta_c independently of delta_2.
        CHECK(e.e_zero == n * dc);
        CHECK(closed_form_energies(n, dc, d2 + 1.0, g).e_zero == e.e_zero);
    }
}

TEST_CASE("blocks are the excitation-number restriction of the full hamiltonian") {
    // The block measures energies from the |0,g> level at delta2 - delta1, so
    // the restriction of H differs from it by that multiple of the identity.
    HilbertSpace space{8, 3};
    ModelParams p;
    p.g = 2.1;
    p.delta_c = 0.6;
    p.delta1_ratio = 0.13;
    p.delta2_ratio = -0.35;
    const DenseMatrix h = build_hamiltonian(p, space, false).dense();

    for (int n = 1; n <= 5; ++n) {
        std::vector<int> basis = {space.index_of(n, HilbertSpace::kG),
                                  space.index_of(n - 1, HilbertSpace::kR)};
        if (n >= 2) basis.push_back(space.index_of(n - 2, HilbertSpace::kM));
        const int size = int(basis.size());
        Eigen::MatrixXd restricted(size, size);
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) restricted(i, j) = h(basis[i], basis[j]).real();

        const DressedBlock b = dressed_block(n, p.delta_c, p.delta1(), p.delta2(), p.g);
        const Eigen::MatrixXd expect =
            b.matrix + (p.delta2() - p.delta1()) * Eigen::MatrixXd::Identity(size, size);
        CHECK((restricted - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("dark states") {
    CHECK_THROWS_AS(dark_state(1), std::domain_error);
    CHECK_THROWS_AS(dark_state(0), std::domain_error);

    const Eigen::Vector3d v2 = dark_state(2);
    CHECK(v2(0) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));
    CHECK(v2(1) == 0.0);
    CHECK(v2(2) == doctest::Approx(-std::sqrt(2.0 / 3.0)).epsilon(1e-14));

    const Eigen::Vector3d v3 = dark_state(3);
    CHECK(v3(0) == doctest::Approx(std::sqrt(2.0 / 5.0)).epsilon(1e-14));
    CHECK(v3(2) == doctest::Approx(-std::sqrt(3.0 / 5.0)).epsilon(1e-14));

    for (int n = 2; n <= 6; ++n) {
        const Eigen::Vector3d v = dark_state(n);
        CHECK(std::abs(v.norm() - 1.0) < 1e-14);
        // Annihilated by the Delta_c = 0 block (ratio convention zeroes the
        // Zeeman shifts with it), for any coupling strength.
        const DressedBlock b = dressed_block(n, 0.0, 0.0, 0.0, 1.7);
        CHECK((b.matrix * v).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("branch names round-trip") {
    for (Branch b : {Branch::Minus, Branch::Zero, Branch::Plus})
        CHECK(branch_from_name(branch_name(b)) == b);
    CHECK_THROWS_AS(branch_from_name("upper"), std::invalid_argument);
}

TEST_CASE("resonances in the delta_1 = Delta_c regime") {
    const double g = 1.9;
    // r1 = 1, r2 = 0: vacuum Rabi point at Delta_c = ±g; the vanishing
    // eigenvalue is the lowest at +g (Minus branch) and the highest at -g.
    const auto roots1 = find_resonances(1, 1.0, 0.0, g, 4.0 * g);
    REQUIRE(roots1.size() == 2);
    CHECK(roots1[0].delta_c == doctest::Approx(-g).epsilon(1e-8));
    CHECK(roots1[0].branch == Branch::Plus);
    CHECK(roots1[1].delta_c == doctest::Approx(g).epsilon(1e-8));
    CHECK(roots1[1].branch == Branch::Minus);

    // n = 2: ±sqrt(2n-1) g / n plus the dark-state root pinned at zero.
    const auto roots2 = find_resonances(2, 1.0, 0.0, g, 4.0 * g);
    REQUIRE(roots2.size() == 3);
    CHECK(roots2[0].delta_c == doctest::Approx(-std::sqrt(3.0) / 2.0 * g).epsilon(1e-8));
    CHECK(roots2[0].branch == Branch::Plus);
    CHECK(std::abs(roots2[1].delta_c) < 1e-9 * g);
    CHECK(roots2[1].branch == Branch::Zero);
    CHECK(roots2[2].delta_c == doctest::Approx(std::sqrt(3.0) / 2.0 * g).epsilon(1e-8));
    CHECK(roots2[2].branch == Branch::Minus);

    for (const auto& r : roots1) CHECK(r.residual < 1e-9 * g);
    for (const auto& r : roots2) CHECK(r.residual < 1e-9 * g);
}

TEST_CASE("resonances at the operating ratios") {
    const double g = 6.0, window = 24.0;

    SUBCASE("single-photon pair at (0.1, -0.4)") {
        const auto minus = resonance_frequency(1, Branch::Minus, 0.1, -0.4, g, window);
        const auto plus = resonance_frequency(1, Branch::Plus, 0.1, -0.4, g, window);
        REQUIRE(minus.has_value());
        REQUIRE(plus.has_value());
        const double expect = analytic_root(1, 0.1, -0.4);  // sqrt(2)
        CHECK(minus->delta_c / g == doctest::Approx(expect).epsilon(1e-7));
        CHECK(minus->delta_c / g == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
        CHECK(plus->delta_c == doctest::Approx(-minus->delta_c).epsilon(1e-9));
        CHECK(minus->residual < 1e-9 * g);
    }

    SUBCASE("two-photon pair at (0.1, 0.05)") {
        const auto minus = resonance_frequency(2, Branch::Minus, 0.1, 0.05, g, window);
        const auto plus = resonance_frequency(2, Branch::Plus, 0.1, 0.05, g, window);
        REQUIRE(minus.has_value());
        REQUIRE(plus.has_value());
        const double expect = analytic_root(2, 0.1, 0.05);  // sqrt(40/7) = 2.39045722
        CHECK(minus->delta_c / g == doctest::Approx(expect).epsilon(1e-7));
        CHECK(minus->delta_c / g == doctest::Approx(2.39045722).epsilon(1e-6));
        CHECK(plus->delta_c == doctest::Approx(-minus->delta_c).epsilon(1e-9));

        // Delta_c = 0 stays a root for every n >= 2 under the ratio convention.
        const auto zero = resonance_frequency(2, Branch::Zero, 0.1, 0.05, g, window);
        REQUIRE(zero.has_value());
        CHECK(std::abs(zero->delta_c) < 1e-9 * g);
        const auto all3 = find_resonances(3, 0.1, 0.05, g, window);
        bool has_zero = false;
        for (const auto& r : all3)
            if (r.branch == Branch::Zero && std::abs(r.delta_c) < 1e-9 * g) has_zero = true;
        CHECK(has_zero);
    }

    SUBCASE("single- and two-photon resonances cross near r2 = -0.1") {
        const ResonanceCurve c1 = resonance_curve(1, Branch::Minus, 0.1, -0.15, -0.05, 41, g, window);
        const ResonanceCurve c2 = resonance_curve(2, Branch::Minus, 0.1, -0.15, -0.05, 41, g, window);
        REQUIRE(c1.samples.size() == 41);
        // The separation passes through zero at the crossing, so samples that
        // land on it are pure root-finder noise; count sign changes between
        // samples where the separation is resolved.
        std::vector<std::pair<double, double>> resolved;
        for (int i = 0; i < 41; ++i) {
            REQUIRE(c1.samples[i].delta_c.has_value());
            REQUIRE(c2.samples[i].delta_c.has_value());
            const double d = *c1.samples[i].delta_c - *c2.samples[i].delta_c;
            if (std::abs(d) > 1e-6 * g) resolved.push_back({c1.samples[i].delta2_ratio, d});
        }
        REQUIRE(resolved.size() >= 2);
        int flips = 0;
        double crossing = 0;
        for (size_t i = 0; i + 1 < resolved.size(); ++i)
            if ((resolved[i].second < 0) != (resolved[i + 1].second < 0)) {
                ++flips;
                crossing = 0.5 * (resolved[i].first + resolved[i + 1].first);
            }
        CHECK(flips == 1);
        CHECK(crossing == doctest::Approx(-0.1).epsilon(0.03));
        // At the crossing both hit Delta_c = sqrt(5) g exactly.
        const auto r1 = resonance_frequency(1, Branch::Minus, 0.1, -0.1, g, window);
        const auto r2 = resonance_frequency(2, Branch::Minus, 0.1, -0.1, g, window);
        REQUIRE(r1.has_value());
        REQUIRE(r2.has_value());
        CHECK(r1->delta_c == doctest::Approx(std::sqrt(5.0) * g).epsilon(1e-7));
        CHECK(r2->delta_c == doctest::Approx(r1->delta_c).epsilon(1e-7));
    }

    SUBCASE("no root once the n = 1 branch leaves the window") {
        CHECK(find_resonances(1, 0.1, 0.04, g, 4.0 * g).empty());
        CHECK_FALSE(resonance_frequency(1, Branch::Minus, 0.1, 0.05, g, 4.0 * g).has_value());
        // At r2 = r1 the determinant never vanishes at all.
        CHECK(find_resonances(1, 0.1, 0.1, g, 8.0 * g).empty());
    }
}

TEST_CASE("resonance curves carry their scan metadata") {
    const ResonanceCurve c = resonance_curve(1, Branch::Minus, 0.1, -0.4, 0.05, 10, 6.0, 24.0);
    CHECK(c.n == 1);
    CHECK(c.branch == Branch::Minus);
    CHECK(c.g == 6.0);
    REQUIRE(c.samples.size() == 10);
    CHECK(c.samples.front().delta2_ratio == -0.4);
    CHECK(c.samples.back().delta2_ratio == doctest::Approx(0.05).epsilon(1e-14));
    REQUIRE(c.samples.front().delta_c.has_value());
    CHECK(*c.samples.front().delta_c == doctest::Approx(std::sqrt(2.0) * 6.0).epsilon(1e-7));
    // r2 = 0.05 puts the root at 4.47 g, outside the 4 g window.
    CHECK_FALSE(c.samples.back().delta_c.has_value());
    CHECK(c.samples.back().residual == 0.0);

    CHECK_THROWS_AS(find_resonances(0, 0.1, 0.0, 6.0, 24.0), std::invalid_argument);
    CHECK_THROWS_AS(find_resonances(1, 0.1, 0.0, 0.0, 24.0), std::invalid_argument);
    CHECK_THROWS_AS(find_resonances(1, 0.1, 0.0, 6.0, 0.0), std::invalid_argument);
}
