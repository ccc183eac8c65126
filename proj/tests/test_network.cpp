// tests/test_network.cpp
#include "isoent/network.hpp"
#include "isoent/rng.hpp"

#include <doctest.h>

using namespace isoent;

namespace {

// Independent contraction for noiseless networks: build the six-qubit pure
// state amplitude-by-amplitude in measurement order and project onto the
// basis columns. Shares no code with the density-matrix route.
TriangleDistribution pure_state_oracle(const Basis& ba, const Basis& bb, const Basis& bc,
                                       const Vec& edge, const std::array<int, 6>& wiring) {
    Vec psi_meas(64);
    for (int i = 0; i < 64; ++i) {
        int bits_state[6];
        for (int q = 0; q < 6; ++q) bits_state[wiring[q]] = (i >> (5 - q)) & 1;
        // state slots [A1(AB), B1(AB), A2(AC), C1(AC), B2(BC), C2(BC)]
        const cplx amp = edge(2 * bits_state[0] + bits_state[1]) *
                         edge(2 * bits_state[2] + bits_state[3]) *
                         edge(2 * bits_state[4] + bits_state[5]);
        psi_meas(i) = amp;
    }
    const Mat ma = ba.computational(), mb = bb.computational(), mc = bc.computational();
    TriangleDistribution out;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                const Vec v = kron(Vec(ma.col(a)), kron(Vec(mb.col(b)), Vec(mc.col(c))));
                out.at(a, b, c) = std::norm(v.dot(psi_meas));
            }
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("network");

TEST_CASE("depolarizing channel") {
    const Mat rho = outer(bell_psi_plus());
    CHECK(max_abs(depolarize(rho, 0.0) - rho) < 1e-15);
    CHECK(max_abs(depolarize(rho, 1.0) - 0.25 * Mat::Identity(4, 4)) < 1e-15);

    auto ev = hermitian_eigenvalues(depolarize(rho, 0.5));
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx(1.0 / 8));
    CHECK(ev[1] == doctest::Approx(1.0 / 8));
    CHECK(ev[2] == doctest::Approx(1.0 / 8));
    CHECK(ev[3] == doctest::Approx(5.0 / 8));

    CHECK_THROWS_AS(depolarize(rho, -0.1), std::domain_error);
    CHECK_THROWS_AS(depolarize(rho, 1.1), std::domain_error);
}

TEST_CASE("white noise gives the uniform distribution") {
    TriangleConfig cfg = default_triangle_config();
    cfg.epsilon = 1.0;
    const TriangleDistribution d = triangle_distribution(cfg);
    for (double v : d.p) CHECK(std::abs(v - 1.0 / 64) < 1e-14);
    const OPISummary s = opi_summary(d);
    CHECK(s.p1 == doctest::Approx(1.0 / 64));
    CHECK(s.p2 == doctest::Approx(1.0 / 64));
    CHECK(s.p3 == doctest::Approx(1.0 / 64));
    CHECK(s.max_deviation < 1e-14);
    CHECK(finner_margin(d) == doctest::Approx(7.0 / 64));
}

TEST_CASE("computational bases on phi+ edges copy shared bits") {
    TriangleConfig cfg = default_triangle_config();
    cfg.basisA = cfg.basisB = cfg.basisC = make_basis(Mat::Identity(4, 4));
    cfg.edge_state = outer(bell_phi_plus());
    const TriangleDistribution d = triangle_distribution(cfg);

    // expected: outcomes a=2r1+r2, b=2r1+r3, c=2r2+r3 for uniform bits r
    TriangleDistribution expect;
    for (int r1 = 0; r1 < 2; ++r1)
        for (int r2 = 0; r2 < 2; ++r2)
            for (int r3 = 0; r3 < 2; ++r3)
                expect.at(2 * r1 + r2, 2 * r1 + r3, 2 * r2 + r3) += 1.0 / 8;
    for (int i = 0; i < 64; ++i) CHECK(std::abs(d.p[i] - expect.p[i]) < 1e-13);
}

TEST_CASE("density-matrix route matches the pure-state oracle") {
    Rng rng(67);
    for (const auto& edge : {bell_psi_plus(), bell_phi_plus()}) {
        TriangleConfig cfg;
        cfg.basisA = make_basis(haar_unitary(4, rng.next_u64()));
        cfg.basisB = make_basis(haar_unitary(4, rng.next_u64()));
        cfg.basisC = gen_elegant_opi(0.6);
        cfg.edge_state = outer(edge);
        cfg.wiring = kCyclicWiring;
        const TriangleDistribution d = triangle_distribution(cfg);
        const TriangleDistribution o =
            pure_state_oracle(cfg.basisA, cfg.basisB, cfg.basisC, edge, cfg.wiring);
        for (int i = 0; i < 64; ++i) CHECK(std::abs(d.p[i] - o.p[i]) < 1e-12);
    }
}

TEST_CASE("distributions are normalized and positive") {
    Rng rng(71);
    for (int k = 0; k < 30; ++k) {
        TriangleConfig cfg;
        cfg.basisA = make_basis(haar_unitary(4, rng.next_u64()));
        cfg.basisB = make_basis(haar_unitary(4, rng.next_u64()));
        cfg.basisC = make_basis(haar_unitary(4, rng.next_u64()));
        cfg.edge_state = outer(bell_psi_plus());
        cfg.epsilon = rng.next_double();
        cfg.wiring = (k % 2) ? kCyclicWiring : kLexicographicWiring;
        const TriangleDistribution d = triangle_distribution(cfg);
        CHECK(std::abs(d.sum() - 1.0) < 1e-10);
        for (double v : d.p) CHECK(v >= -1e-12);
        const OPISummary s = opi_summary(d);
        CHECK(std::abs(4 * s.p1 + 36 * s.p2 + 24 * s.p3 - 1.0) < 1e-10);
    }
}

TEST_CASE("elegant distribution at the pinned convention") {
    const TriangleDistribution d = triangle_distribution(opi_triangle_config());
    const OPISummary s = opi_summary(d);
    CHECK(s.p1 == doctest::Approx(25.0 / 256).epsilon(1e-12));
    CHECK(s.p2 == doctest::Approx(1.0 / 256).epsilon(1e-12));
    CHECK(s.p3 == doctest::Approx(5.0 / 256).epsilon(1e-12));
    CHECK(s.max_deviation < 1e-12);
    CHECK(finner_margin(d) >= 0.0);
}

TEST_CASE("the OPI subfamily is OPI at zero noise and breaks under noise") {
    for (int i = 0; i <= 20; ++i) {
        const double theta = pi / 2 * i / 20.0;
        TriangleConfig cfg = opi_triangle_config();
        cfg.basisA = cfg.basisB = cfg.basisC = gen_elegant_opi(theta);
        CHECK(opi_summary(triangle_distribution(cfg)).max_deviation <= 1e-10);
    }
    // interior point under depolarizing noise
    TriangleConfig broken = opi_triangle_config();
    broken.basisA = broken.basisB = broken.basisC = gen_elegant_opi(pi / 6);
    broken.epsilon = 0.1;
    CHECK(opi_summary(triangle_distribution(broken)).max_deviation > 1e-6);
    // the EJM point stays OPI under noise
    TriangleConfig ejm = opi_triangle_config();
    ejm.epsilon = 0.1;
    CHECK(opi_summary(triangle_distribution(ejm)).max_deviation < 1e-12);
}

TEST_CASE("the OPI subfamily is iso-entangled with the elegant tangle") {
    for (int i = 0; i <= 10; ++i) {
        const double theta = pi / 2 * i / 10.0;
        const Basis b = gen_elegant_opi(theta);
        const double expect = std::pow(std::sin(2 * theta), 2) / 4.0;
        for (double t : column_tangles(b)) CHECK(std::abs(t - expect) < 1e-10);
        CHECK(iso_residuals(b).max_abs() < 1e-10);
    }
}

TEST_CASE("relabeling outcomes permutes the distribution") {
    TriangleConfig cfg = opi_triangle_config();
    cfg.basisA = make_basis(haar_unitary(4, 12345));
    const TriangleDistribution d = triangle_distribution(cfg);

    // permute C's basis columns alone: p transforms pointwise
    const std::array<int, 4> perm{2, 0, 3, 1};
    auto permute_basis = [&](const Basis& b) {
        Mat m = b.computational();
        Mat out(4, 4);
        for (int i = 0; i < 4; ++i) out.col(i) = m.col(perm[i]);
        return make_basis(out);
    };
    TriangleConfig cfg2 = cfg;
    cfg2.basisC = permute_basis(cfg.basisC);
    const TriangleDistribution d2 = triangle_distribution(cfg2);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                CHECK(std::abs(d2(a, b, c) - d(a, b, perm[c])) < 1e-13);

    // a common relabeling of all three parties preserves the orbit averages
    TriangleConfig cfg3 = cfg;
    cfg3.basisA = permute_basis(cfg.basisA);
    cfg3.basisB = permute_basis(cfg.basisB);
    cfg3.basisC = permute_basis(cfg.basisC);
    const TriangleDistribution d3 = triangle_distribution(cfg3);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                CHECK(std::abs(d3(a, b, c) - d(perm[a], perm[b], perm[c])) < 1e-13);
    const OPISummary s = opi_summary(d), s3 = opi_summary(d3);
    CHECK(s.p1 == doctest::Approx(s3.p1).epsilon(1e-12));
    CHECK(s.p2 == doctest::Approx(s3.p2).epsilon(1e-12));
    CHECK(s.p3 == doctest::Approx(s3.p3).epsilon(1e-12));
}

TEST_CASE("cyclic relabeling of the parties preserves the orbit summary") {
    Rng rng(73);
    const Basis x = make_basis(haar_unitary(4, rng.next_u64()));
    const Basis y = make_basis(haar_unitary(4, rng.next_u64()));
    const Basis z = make_basis(haar_unitary(4, rng.next_u64()));
    TriangleConfig cfg = opi_triangle_config();
    cfg.basisA = x;
    cfg.basisB = y;
    cfg.basisC = z;
    const OPISummary s1 = opi_summary(triangle_distribution(cfg));
    cfg.basisA = z;
    cfg.basisB = x;
    cfg.basisC = y;
    const OPISummary s2 = opi_summary(triangle_distribution(cfg));
    CHECK(s1.p1 == doctest::Approx(s2.p1).epsilon(1e-11));
    CHECK(s1.p2 == doctest::Approx(s2.p2).epsilon(1e-11));
    CHECK(s1.p3 == doctest::Approx(s2.p3).epsilon(1e-11));
}

TEST_CASE("each edge contributes affinely in its own noise") {
    const Basis b = gen_elegant_opi(0.8);
    const Mat clean = outer(bell_phi_plus());
    auto p_at = [&](double eps) {
        return triangle_distribution(b, b, b, depolarize(clean, eps), clean, clean,
                                     kCyclicWiring);
    };
    const TriangleDistribution d0 = p_at(0.0), d13 = p_at(1.0 / 3), d23 = p_at(2.0 / 3),
                               d1 = p_at(1.0);
    for (int i = 0; i < 64; ++i) {
        // second differences of an affine function vanish
        CHECK(std::abs(d13.p[i] - 2 * d23.p[i] + d1.p[i] -
                       (d0.p[i] - 2 * d13.p[i] + d23.p[i])) < 1e-12);
        CHECK(std::abs(d0.p[i] - 2 * d13.p[i] + d23.p[i]) < 1e-12);
    }
}

TEST_CASE("scan curves") {
    const auto noise = scan_p1p3(ScanCurve::EjmNoise, 11);
    REQUIRE(noise.size() == 11);
    CHECK(noise.back().param == doctest::Approx(1.0));
    CHECK(noise.back().p1 == doctest::Approx(1.0 / 64).epsilon(1e-12));
    CHECK(noise.back().p3 == doctest::Approx(1.0 / 64).epsilon(1e-12));
    for (size_t i = 1; i < noise.size(); ++i) CHECK(noise[i].param > noise[i - 1].param);
    for (const auto& r : noise) {
        CHECK(r.finner >= -1e-12);
        CHECK(r.max_deviation <= 1e-9);
    }

    const auto eleg = scan_p1p3(ScanCurve::ElegantOpiSubfamily, 21);
    REQUIRE(eleg.size() == 21);
    for (const auto& r : eleg) {
        CHECK(r.max_deviation <= 1e-9);
        CHECK(r.finner >= -1e-12);
    }
    // both curves meet at the EJM point
    CHECK(eleg[10].p1 == doctest::Approx(noise.front().p1).epsilon(1e-12));
    CHECK(eleg[10].p3 == doctest::Approx(noise.front().p3).epsilon(1e-12));
}

TEST_CASE("scan csv format") {
    const auto rows = scan_p1p3(ScanCurve::EjmNoise, 3);
    const std::string csv = scan_csv(rows);
    CHECK(csv.substr(0, 47) == "param,p1,p2,p3,finner_margin,max_deviation\n0,0.");
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("config validation") {
    TriangleConfig cfg = default_triangle_config();
    cfg.wiring = {0, 0, 1, 2, 3, 4};
    CHECK_THROWS_AS(triangle_distribution(cfg), std::invalid_argument);
    cfg = default_triangle_config();
    cfg.basisA = make_basis(Mat(Mat::Ones(4, 4)));
    CHECK_THROWS_AS(triangle_distribution(cfg), std::invalid_argument);
}

TEST_SUITE_END();
