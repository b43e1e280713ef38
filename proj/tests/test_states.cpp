#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spintomo/states.hpp"
#include "spintomo/su2_math.hpp"
#include "test_helpers.hpp"

using namespace spintomo;

namespace {
HalfInteger half(int twice) { return HalfInteger::from_twice(twice); }
} // namespace

TEST_CASE("make_dicke places the single amplitude") {
    const StateVector top = make_dicke(half(2), half(2));
    CHECK(top.amplitudes(0) == Complex(1.0, 0.0));
    CHECK(top.amplitudes(1) == Complex(0.0, 0.0));
    CHECK(top.amplitudes(2) == Complex(0.0, 0.0));

    const StateVector down = make_dicke(half(1), half(-1));
    CHECK(down.amplitudes(0) == Complex(0.0, 0.0));
    CHECK(down.amplitudes(1) == Complex(1.0, 0.0));

    CHECK(make_dicke(half(7), half(3)).amplitudes.norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(make_dicke(half(2), half(4)), std::domain_error);
    CHECK_THROWS_AS(make_dicke(half(2), half(1)), std::domain_error); // parity
}

TEST_CASE("make_coherent at the poles") {
    const StateVector north = make_coherent(half(5), SpherePoint{0.0, 1.3});
    CHECK(std::abs(north.amplitudes(0)) == doctest::Approx(1.0).epsilon(1e-14));

    const StateVector south = make_coherent(half(5), SpherePoint{std::numbers::pi, 0.0});
    CHECK(std::abs(south.amplitudes(5)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("make_coherent satisfies the overlap law") {
    oracle::Random rnd(21);
    for (int tj : {1, 2, 3, 5, 8}) {
        for (int trial = 0; trial < 10; ++trial) {
            const SpherePoint a = rnd.sphere_point();
            const SpherePoint b = rnd.sphere_point();
            const Complex overlap =
                make_coherent(half(tj), a).amplitudes.dot(make_coherent(half(tj), b).amplitudes);
            const double expected = std::pow(0.5 * (1.0 + a.dot(b)), tj);
            CHECK(std::norm(overlap) == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("make_coherent equals the rotated highest-weight state") {
    oracle::Random rnd(22);
    for (int tj : {1, 2, 5, 9}) {
        const SpherePoint n = rnd.sphere_point();
        const Eigen::VectorXcd rotated =
            rotation_operator(half(tj), n) * make_dicke(half(tj), half(tj)).amplitudes;
        CHECK((make_coherent(half(tj), n).amplitudes - rotated).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("make_superposition normalizes and validates") {
    Eigen::VectorXcd coeffs(3);
    coeffs << Complex(1, 0), Complex(0, 0), Complex(0, 0);
    CHECK((make_superposition(half(2), coeffs).amplitudes -
           make_dicke(half(2), half(2)).amplitudes)
              .cwiseAbs()
              .maxCoeff() == 0.0);

    Eigen::VectorXcd pair(2);
    pair << Complex(1, 0), Complex(1, 0);
    const StateVector plus = make_superposition(half(1), pair);
    CHECK(plus.amplitudes(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

    // normalizing a normalized vector is the identity
    const StateVector again = make_superposition(half(1), plus.amplitudes);
    CHECK((again.amplitudes - plus.amplitudes).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(make_superposition(half(2), Eigen::VectorXcd::Zero(3)), std::domain_error);
    CHECK_THROWS_AS(make_superposition(half(2), Eigen::VectorXcd::Ones(2)), std::domain_error);
}

TEST_CASE("make_mixture convexity and validation") {
    oracle::Random rnd(23);
    const HalfInteger j = half(3);
    const StateVector psi = rnd.pure_state(j);

    const DensityMatrix pure = make_mixture({{2.5, pure_density(psi)}});
    CHECK((pure.matrix - pure_density(psi).matrix).cwiseAbs().maxCoeff() < 1e-14);

    std::vector<MixtureComponent> comps;
    for (int tm = -3; tm <= 3; tm += 2)
        comps.push_back({1.0, pure_density(make_dicke(j, half(tm)))});
    const DensityMatrix mixed = make_mixture(comps);
    CHECK((mixed.matrix - Eigen::MatrixXcd::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-14);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        make_mixture({{0.3, pure_density(rnd.pure_state(j))},
                      {0.7, pure_density(rnd.pure_state(j))}})
            .matrix);
    CHECK(solver.eigenvalues().minCoeff() >= -1e-12);

    CHECK_THROWS_AS(make_mixture({{1.0, pure_density(psi)},
                                  {1.0, pure_density(rnd.pure_state(half(1)))}}),
                    std::domain_error);
    CHECK_THROWS_AS(make_mixture({{0.0, pure_density(psi)}}), std::domain_error);
    CHECK_THROWS_AS(make_mixture({{-0.1, pure_density(psi)}}), std::domain_error);
}

TEST_CASE("constructor outputs satisfy the state invariants") {
    oracle::Random rnd(24);
    for (int tj : {0, 1, 2, 4}) {
        validate_state(make_dicke(half(tj), half(tj)));
        validate_state(make_coherent(half(tj), rnd.sphere_point()));
        validate_state(rnd.pure_state(half(tj)));
        validate_density(pure_density(rnd.pure_state(half(tj))));
        validate_density(rnd.mixed_state(half(tj)));
    }
}
