// tests/test_core.cpp
#include "isoent/core.hpp"
#include "isoent/rng.hpp"

#include <doctest.h>

using namespace isoent;

TEST_SUITE_BEGIN("core");

TEST_CASE("kron basics") {
    Vec e0 = basis_state(2, 0);
    Vec k = kron(e0, e0);
    REQUIRE(k.size() == 4);
    CHECK(std::abs(k(0) - 1.0) < 1e-15);
    CHECK(k.tail(3).norm() < 1e-15);

    Mat i4 = kron(Mat(Mat::Identity(2, 2)), Mat(Mat::Identity(2, 2)));
    CHECK(max_abs(i4 - Mat::Identity(4, 4)) < 1e-15);

    Vec psi = bell_psi_plus();
    CHECK(kron(psi, psi).size() == 16);

    // ordering convention: left factor is the most significant index
    Vec e1 = basis_state(2, 1);
    Vec k10 = kron(e1, e0);
    CHECK(std::abs(k10(2) - 1.0) < 1e-15);
}

TEST_CASE("partial trace") {
    // product state keeps its factor
    Vec psi00 = kron(basis_state(2, 0), basis_state(2, 0));
    Mat ra = partial_trace(outer(psi00), 2, 2, Subsys::A);
    CHECK(max_abs(ra - outer(basis_state(2, 0))) < 1e-14);

    // maximally entangled state reduces to I/2
    Mat rb = partial_trace(outer(bell_phi_plus()), 2, 2, Subsys::A);
    CHECK(max_abs(rb - 0.5 * Mat::Identity(2, 2)) < 1e-14);

    // Schmidt form
    for (double th : {0.2, 0.7, 1.3}) {
        Vec psi = std::cos(th) * kron(basis_state(2, 0), basis_state(2, 0)) +
                  std::sin(th) * kron(basis_state(2, 1), basis_state(2, 1));
        Mat r = partial_trace(outer(psi), 2, 2, Subsys::A);
        CHECK(std::abs(r(0, 0).real() - std::cos(th) * std::cos(th)) < 1e-14);
        CHECK(std::abs(r(1, 1).real() - std::sin(th) * std::sin(th)) < 1e-14);
        CHECK(std::abs(r(0, 1)) < 1e-14);
    }

    // trace preserved for both subsystems of a random mixed state
    Rng rng(7);
    Mat g = ginibre(4, rng);
    Mat rho = g * g.adjoint();
    rho /= rho.trace();
    for (Subsys s : {Subsys::A, Subsys::B}) {
        Mat red = partial_trace(rho, 2, 2, s);
        CHECK(std::abs(red.trace().real() - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(partial_trace(rho, 3, 2, Subsys::A), std::invalid_argument);
}

TEST_CASE("tangle") {
    CHECK(tangle(kron(basis_state(2, 0), basis_state(2, 0))) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(tangle(bell_phi_plus()) == doctest::Approx(1.0).epsilon(1e-14));
    for (double th = 0.05; th < 1.5; th += 0.11) {
        Vec psi = std::cos(th) * kron(basis_state(2, 0), basis_state(2, 0)) +
                  std::sin(th) * kron(basis_state(2, 1), basis_state(2, 1));
        const double s = std::sin(2 * th);
        CHECK(std::abs(tangle(psi) - s * s) < 1e-13);
    }
    Vec bad = Vec::Ones(4);
    CHECK_THROWS_AS(tangle(bad), std::invalid_argument);
    CHECK_THROWS_AS(tangle(Vec(Vec::Ones(3))), std::invalid_argument);
}

TEST_CASE("bloch vector") {
    BlochVector v = bloch_vector(outer(basis_state(2, 0)));
    CHECK(std::abs(v.x) < 1e-15);
    CHECK(std::abs(v.y) < 1e-15);
    CHECK(std::abs(v.z - 1.0) < 1e-15);

    v = bloch_vector(Mat(0.5 * Mat::Identity(2, 2)));
    CHECK(v.norm() < 1e-15);

    Vec plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    v = bloch_vector(outer(plus));
    CHECK(std::abs(v.x - 1.0) < 1e-15);

    // round trip through (I + v.sigma)/2
    Rng rng(11);
    for (int k = 0; k < 200; ++k) {
        BlochVector w{rng.next_double() - 0.5, rng.next_double() - 0.5, rng.next_double() - 0.5};
        const double n = w.norm();
        if (n > 1.0) continue;
        BlochVector back = bloch_vector(density_from_bloch(w));
        CHECK(std::abs(back.x - w.x) < 1e-12);
        CHECK(std::abs(back.y - w.y) < 1e-12);
        CHECK(std::abs(back.z - w.z) < 1e-12);
    }
    CHECK_THROWS_AS(bloch_vector(Mat(Mat::Identity(4, 4))), std::invalid_argument);
}

TEST_CASE("schmidt spectrum") {
    auto s = schmidt_spectrum(bell_phi_plus(), 2);
    CHECK(std::abs(s[0] - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(s[1] - 1.0 / std::sqrt(2.0)) < 1e-14);

    s = schmidt_spectrum(kron(basis_state(2, 0), basis_state(2, 1)), 2);
    CHECK(std::abs(s[0] - 1.0) < 1e-14);
    CHECK(std::abs(s[1]) < 1e-14);

    // monomial amplitudes (cos mu, sin mu): spectrum is the sorted pair;
    // the expected values come from the diagonal reduction, not the SVD path
    for (double mu = 0.1; mu < 1.5; mu += 0.2) {
        Vec psi = std::cos(mu) * kron(basis_state(2, 0), basis_state(2, 0)) +
                  std::sin(mu) * kron(basis_state(2, 1), basis_state(2, 1));
        auto sp = schmidt_spectrum(psi, 2);
        const double hi = std::max(std::abs(std::cos(mu)), std::abs(std::sin(mu)));
        const double lo = std::min(std::abs(std::cos(mu)), std::abs(std::sin(mu)));
        CHECK(std::abs(sp[0] - hi) < 1e-13);
        CHECK(std::abs(sp[1] - lo) < 1e-13);
    }
    CHECK_THROWS_AS(schmidt_spectrum(Vec(Vec::Ones(6)), 2), std::invalid_argument);
}

TEST_CASE("orthonormality residual") {
    CHECK(orthonormality_residual(Mat(Mat::Identity(4, 4))) == 0.0);
    Mat dup = Mat::Identity(4, 4);
    dup.col(1) = dup.col(0);
    CHECK(orthonormality_residual(dup) == doctest::Approx(1.0));
}

TEST_CASE("tangle equals linear entropy of the Schmidt spectrum") {
    Rng rng(23);
    for (int k = 0; k < 300; ++k) {
        Vec psi(4);
        for (int i = 0; i < 4; ++i) psi(i) = rng.next_complex_gaussian();
        psi /= psi.norm();
        auto sp = schmidt_spectrum(psi, 2);
        double quartic = 0;
        for (double x : sp) quartic += x * x * x * x;
        CHECK(std::abs(tangle(psi) - 2.0 * (1.0 - quartic)) < 1e-10);
    }
}

TEST_CASE("tangle is invariant under local unitaries") {
    Rng rng(29);
    for (int k = 0; k < 200; ++k) {
        Vec psi(4);
        for (int i = 0; i < 4; ++i) psi(i) = rng.next_complex_gaussian();
        psi /= psi.norm();
        Mat u = kron(random_local(rng), random_local(rng));
        CHECK(std::abs(tangle(Vec(u * psi)) - tangle(psi)) < 1e-10);
    }
}

TEST_CASE("density matrix checks") {
    CHECK(is_density_matrix(Mat(0.25 * Mat::Identity(4, 4))));
    CHECK_FALSE(is_density_matrix(Mat(Mat::Identity(4, 4))));
    Mat rho = outer(bell_psi_plus());
    CHECK(is_density_matrix(rho));
}

TEST_CASE("rng reproducibility") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Mat u1 = haar_unitary(4, 99), u2 = haar_unitary(4, 99);
    CHECK(max_abs(u1 - u2) == 0.0);
    CHECK(orthonormality_residual(u1) < 1e-13);
}

TEST_SUITE_END();
