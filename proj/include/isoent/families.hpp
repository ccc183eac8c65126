// isoent/families.hpp
// Closed-form generators for the two-qubit iso-entangled measurement families:
// the skewed product frame, the general 6-angle orthonormal parametrization,
// the four iso-entangled families with their closed-form tangles, the
// canonical Bell construction from local geometry, and the interpolating
// family I5, plus the iso-entanglement residual check.

#pragma once

#include "isoent/core.hpp"

#include <array>
#include <variant>

namespace isoent {

// ---------------------------------------------------------------------------
// parameter records

// Angles of the general orthonormal parametrization. tau is the skew angle of
// the underlying product frame; the other five live in the coefficient matrix.
struct GeneralOrthParams {
    double alpha = 0, delta = 0, theta = 0, gamma = 0, beta = 0, tau = 0;
};

struct SkewedProductParams {
    double tau = 0;
};

struct ElegantParams {
    double theta = 0, zeta = 0;
};

struct BellParams {
    double delta = 0, zeta = 0, tau = 0;
};

struct GeneralParams {
    double delta = 0, theta = 0, beta = 0;
    int sign = +1;  // selects the e^{+i beta} / e^{-i beta} branch
};

struct BellCanonicalParams {
    double x = 0, y = 0, z = 0;
    int phase_sign = +1;  // selects the +phi_1 / -phi_1 branch
};

struct I5Params {
    double phi = 0;
};

using FamilyParams = std::variant<SkewedProductParams, ElegantParams, BellParams, GeneralParams,
                                  BellCanonicalParams, I5Params>;

inline double wrap_angle(double a) {
    double w = std::fmod(a, 2.0 * pi);
    if (w < 0) w += 2.0 * pi;
    return w;
}

// Parameters are reduced mod 2*pi on input; the pi/2-periodicities inside the
// families are deliberately not collapsed (classification handles those).
inline FamilyParams canonicalized(FamilyParams p) {
    struct Visitor {
        void operator()(SkewedProductParams& q) const { q.tau = wrap_angle(q.tau); }
        void operator()(ElegantParams& q) const {
            q.theta = wrap_angle(q.theta);
            q.zeta = wrap_angle(q.zeta);
        }
        void operator()(BellParams& q) const {
            q.delta = wrap_angle(q.delta);
            q.zeta = wrap_angle(q.zeta);
            q.tau = wrap_angle(q.tau);
        }
        void operator()(GeneralParams& q) const {
            q.delta = wrap_angle(q.delta);
            q.theta = wrap_angle(q.theta);
            q.beta = wrap_angle(q.beta);
        }
        void operator()(BellCanonicalParams& q) const {
            q.x = wrap_angle(q.x);
            q.y = wrap_angle(q.y);
            q.z = wrap_angle(q.z);
        }
        void operator()(I5Params& q) const { q.phi = wrap_angle(q.phi); }
    };
    std::visit(Visitor{}, p);
    return p;
}

// ---------------------------------------------------------------------------
// bases and frames

enum class Frame { Computational, Skewed };

// Ordered orthonormal basis, columns of m. When frame == Skewed the
// coefficients are expressed in the product frame |00>,|01>,|1,phi>,|1,phi'>
// with phi = cos(tau)|0> + sin(tau)|1>.
struct Basis {
    Mat m;
    Frame frame = Frame::Computational;
    double tau = 0;

    Mat computational() const;
    Vec column(int j) const { return computational().col(j); }
    int dim() const { return static_cast<int>(m.rows()); }
};

// Unitary whose columns are the skewed product frame in computational
// coordinates. Left-multiplication converts skewed-frame coefficients to
// computational ones.
inline Mat skewed_frame_matrix(double tau) {
    const double c = std::cos(tau), s = std::sin(tau);
    Mat f = Mat::Identity(4, 4);
    f(2, 2) = c;
    f(3, 2) = s;
    f(2, 3) = -s;
    f(3, 3) = c;
    return f;
}

inline Mat Basis::computational() const {
    if (frame == Frame::Computational) return m;
    return skewed_frame_matrix(tau) * m;
}

inline Basis make_basis(Mat m, Frame f = Frame::Computational, double tau = 0) {
    return Basis{std::move(m), f, tau};
}

// ---------------------------------------------------------------------------
// general orthonormal parametrization

// The six-angle matrix; orthonormal for every parameter value. Columns are
// the four basis states, coefficients in the skewed frame of p.tau.
inline Basis gen_general(const GeneralOrthParams& p) {
    const double ca = std::cos(p.alpha), sa = std::sin(p.alpha);
    const double cd = std::cos(p.delta), sd = std::sin(p.delta);
    const double ct = std::cos(p.theta), st = std::sin(p.theta);
    const cplx eg = std::polar(1.0, p.gamma);
    const cplx eb = std::polar(1.0, p.beta);
    Mat m(4, 4);
    m << 0, 0, -ca * eg, sa * eg,                     //
        sd * ct, cd * ct, -sa * st, -ca * st,         //
        sd * st, cd * st, sa * ct, ca * ct,           //
        -cd * eb, sd * eb, cplx(0, 0), cplx(0, 0);
    return make_basis(std::move(m), Frame::Skewed, p.tau);
}

// Constraint fixing tau for the General family. Throws when the denominator
// vanishes, naming the limit family the caller has wandered into.
// The library gate only protects the exactly singular set (the constraint
// itself is a well-conditioned atan2 arbitrarily close to it, and boundary
// fits legitimately work at cos(beta) ~ 1e-14). Interfaces that accept
// user-typed parameters apply the stricter practical gate below.
inline void assert_general_nonsingular(double delta, double beta, double gate) {
    if (std::abs(std::sin(2.0 * delta)) <= gate)
        throw SingularConstraint(
            "general family constraint is singular at sin(2*delta) = 0; "
            "the applicable limit family is the skewed product family (theta, delta -> 0)");
    if (std::abs(std::cos(beta)) <= gate)
        throw SingularConstraint(
            "general family constraint is singular at cos(beta) = 0; "
            "the applicable limit family is the Bell family (beta -> pi/2)");
}

inline constexpr double kGeneralPracticalGate = 1e-9;

inline double general_constraint_tau(double delta, double theta, double beta) {
    assert_general_nonsingular(delta, beta, 1e-15);
    return std::atan2(std::cos(2.0 * delta) * std::sin(theta),
                      std::sin(2.0 * delta) * std::cos(beta));
}

// ---------------------------------------------------------------------------
// family generators

namespace detail {

inline Basis gen_skewed_product(const SkewedProductParams& p) {
    return make_basis(skewed_frame_matrix(p.tau));
}

inline Basis gen_elegant(const ElegantParams& p) {
    const double ct = std::cos(p.theta), st = std::sin(p.theta);
    const cplx ez = std::polar(1.0, p.zeta);
    const double r = 1.0 / std::sqrt(2.0);
    Mat m(4, 4);
    m << 0, 0, -ez, ez,               //
        ct, ct, -st, -st,             //
        st, st, ct, ct,               //
        1, -1, cplx(0, 0), cplx(0, 0);
    return make_basis(r * m);
}

inline Basis gen_bell(const BellParams& p) {
    const double cd = std::cos(p.delta), sd = std::sin(p.delta);
    const double ct = std::cos(p.tau), st = std::sin(p.tau);
    const cplx ez = std::polar(1.0, p.zeta);
    Mat m(4, 4);
    m << 0, 0, -cd * ez, sd * ez,                  //
        sd, cd, 0, 0,                              //
        st * cd, -st * sd, ct * sd, ct * cd,       //
        -ct * cd, ct * sd, st * sd, st * cd;
    return make_basis(std::move(m));
}

inline Basis gen_general_family(const GeneralParams& p) {
    const double tau = general_constraint_tau(p.delta, p.theta, p.beta);
    const double cd = std::cos(p.delta), sd = std::sin(p.delta);
    const double ct = std::cos(p.theta), st = std::sin(p.theta);
    const cplx eb = std::polar(1.0, p.beta);
    const cplx ebs = std::polar(1.0, p.sign >= 0 ? p.beta : -p.beta);
    Mat m(4, 4);
    m << 0, 0, cd * ebs, -sd * ebs,            //
        sd * ct, cd * ct, -sd * st, -cd * st,  //
        sd * st, cd * st, sd * ct, cd * ct,    //
        -cd * eb, sd * eb, cplx(0, 0), cplx(0, 0);
    return make_basis(std::move(m), Frame::Skewed, tau);
}

inline Basis gen_bell_canonical(const BellCanonicalParams& p) {
    const double num = std::sin(2.0 * p.x) * std::sin(2.0 * p.y);
    const double den = std::cos(2.0 * p.x) * std::cos(2.0 * p.y) * std::sin(2.0 * p.z);
    double cphi;
    if (std::abs(den) < 1e-14) {
        if (std::abs(num) < 1e-14)
            cphi = 0.0;  // phases are irrelevant in this degenerate corner
        else
            throw PhaseInfeasible("bell canonical form: |cos(phi_1)| > 1 for these x, y, z");
    } else {
        cphi = -num / den;
    }
    if (std::abs(cphi) > 1.0 + 1e-12)
        throw PhaseInfeasible("bell canonical form: |cos(phi_1)| > 1 for these x, y, z");
    cphi = std::clamp(cphi, -1.0, 1.0);
    const double phi1 = (p.phase_sign >= 0 ? 1.0 : -1.0) * std::acos(cphi);

    auto ket = [](double c, double s) {
        Vec v(2);
        v << c, s;
        return v;
    };
    // local bases and their dephased orthogonal companions, taken literally:
    // |A1> = (cx, sx), |A2> = (cx, -sx), |A1p> = (-sx, cx), |A2p> = (sx, cx)
    const double cx = std::cos(p.x), sx = std::sin(p.x);
    const double cy = std::cos(p.y), sy = std::sin(p.y);
    const Vec a1 = ket(cx, sx), a2 = ket(cx, -sx), a1p = ket(-sx, cx), a2p = ket(sx, cx);
    const Vec b1 = ket(cy, sy), b2 = ket(cy, -sy), b1p = ket(-sy, cy), b2p = ket(sy, cy);
    const double cz = std::cos(p.z), sz = std::sin(p.z);
    // phase pattern phi_1 = -phi_2 = -phi_3 = phi_4
    const cplx e1 = std::polar(1.0, phi1), e2 = std::polar(1.0, -phi1);
    Mat m(4, 4);
    m.col(0) = cz * kron(a1, b1) + e1 * sz * kron(a1p, b1p);
    m.col(1) = cz * kron(a1p, b2) + e2 * sz * kron(a1, b2p);
    m.col(2) = cz * kron(a2, b1p) + e2 * sz * kron(a2p, b1);
    m.col(3) = cz * kron(a2p, b2p) + e1 * sz * kron(a2, b2);
    return make_basis(std::move(m));
}

inline Basis gen_i5(const I5Params& p) {
    const cplx i(0, 1);
    const cplx e = std::polar(1.0, p.phi);
    const double r = 1.0 / (2.0 * std::sqrt(2.0));
    Mat m(4, 4);
    m << cplx(1, 1), cplx(1, -1), cplx(1, -1), cplx(1, 1),            //
        -i * e - i, i * e - i, i - i * e, i * e + i,                  //
        i * e - i, -i * e - i, i * e + i, i - i * e,                  //
        cplx(1, -1), cplx(1, 1), cplx(1, 1), cplx(1, -1);
    return make_basis(r * m);
}

}  // namespace detail

inline Basis gen_family(const FamilyParams& params) {
    const FamilyParams p = canonicalized(params);
    struct Visitor {
        Basis operator()(const SkewedProductParams& q) const { return detail::gen_skewed_product(q); }
        Basis operator()(const ElegantParams& q) const { return detail::gen_elegant(q); }
        Basis operator()(const BellParams& q) const { return detail::gen_bell(q); }
        Basis operator()(const GeneralParams& q) const { return detail::gen_general_family(q); }
        Basis operator()(const BellCanonicalParams& q) const { return detail::gen_bell_canonical(q); }
        Basis operator()(const I5Params& q) const { return detail::gen_i5(q); }
    };
    return std::visit(Visitor{}, p);
}

// ---------------------------------------------------------------------------
// closed-form tangles

inline double closed_form_tangle(const FamilyParams& params) {
    const FamilyParams p = canonicalized(params);
    struct Visitor {
        double operator()(const SkewedProductParams&) const { return 0.0; }
        double operator()(const ElegantParams& p) const {
            const double s = std::sin(2.0 * p.theta);
            return s * s / 4.0;
        }
        double operator()(const BellParams& p) const {
            const double s = std::sin(2.0 * p.delta) * std::sin(p.tau);
            return s * s;
        }
        double operator()(const GeneralParams& p) const {
            general_constraint_tau(p.delta, p.theta, p.beta);  // same singularities
            const double s2t = std::sin(2.0 * p.theta), s2d = std::sin(2.0 * p.delta);
            const double c2d = std::cos(2.0 * p.delta), cb = std::cos(p.beta);
            const double st = std::sin(p.theta);
            const double num = s2d * s2d * cb * cb + c2d * c2d;
            const double den = s2d * s2d * cb * cb + c2d * c2d * st * st;
            return 0.25 * s2t * s2t * s2d * s2d * num / den;
        }
        double operator()(const BellCanonicalParams& p) const {
            const double s = std::sin(2.0 * p.z);
            return s * s;
        }
        double operator()(const I5Params& p) const {
            return (5.0 - 3.0 * std::cos(2.0 * p.phi)) / 8.0;
        }
    };
    return std::visit(Visitor{}, p);
}

// ---------------------------------------------------------------------------
// iso-entanglement residuals

struct IsoResiduals {
    double r12 = 0, r34 = 0, r13 = 0;
    double max_abs() const {
        return std::max({std::abs(r12), std::abs(r34), std::abs(r13)});
    }
};

// Numeric pairwise tangle differences (xi1-xi2, xi3-xi4, xi1-xi3); all three
// small iff the basis is iso-entangled.
inline IsoResiduals iso_residuals(const Basis& b) {
    const Mat c = b.computational();
    std::array<double, 4> xi{};
    for (int j = 0; j < 4; ++j) xi[j] = tangle(c.col(j));
    return IsoResiduals{xi[0] - xi[1], xi[2] - xi[3], xi[0] - xi[2]};
}

inline std::array<double, 4> column_tangles(const Basis& b) {
    const Mat c = b.computational();
    return {tangle(c.col(0)), tangle(c.col(1)), tangle(c.col(2)), tangle(c.col(3))};
}

// ---------------------------------------------------------------------------
// limits of the General family at its singular points

enum class Family4Limit {
    BetaToHalfPi,       // beta -> pi/2: Bell subfamily, xi -> cos^2(theta) sin^2(2 delta)
    DeltaToQuarterPi,   // delta -> pi/4: Elegant family, xi -> sin^2(2 theta)/4
    ThetaDeltaToZero,   // theta, delta -> 0: skewed product family, xi -> 0
    BetaDeltaJoint,     // beta -> pi/2, delta -> pi/4: direction-dependent blend
    BetaThetaJoint,     // beta -> pi/2, theta -> 0: Bell subfamily, bounded tangle
};

struct Family4LimitArgs {
    double theta = 0;  // cases 1, 2, 4
    double delta = 0;  // case 1
    double phi = 0;    // approach angle, cases 4, 5
};

inline double family4_limit(Family4Limit which, const Family4LimitArgs& a) {
    switch (which) {
        case Family4Limit::BetaToHalfPi: {
            const double c = std::cos(a.theta), s = std::sin(2.0 * a.delta);
            return c * c * s * s;
        }
        case Family4Limit::DeltaToQuarterPi: {
            const double s = std::sin(2.0 * a.theta);
            return s * s / 4.0;
        }
        case Family4Limit::ThetaDeltaToZero:
            return 0.0;
        case Family4Limit::BetaDeltaJoint: {
            // approach (pi/2 - beta, pi/4 - delta) ~ r (cos phi, sin phi / 2)
            const double s2t = std::sin(2.0 * a.theta), st = std::sin(a.theta);
            const double cp = std::cos(a.phi), sp = std::sin(a.phi);
            return 0.25 * s2t * s2t / (cp * cp + sp * sp * st * st);
        }
        case Family4Limit::BetaThetaJoint: {
            // upper bound of the limiting Bell subfamily over delta
            const double t = std::tan(std::abs(a.phi));
            return 1.0 / ((1.0 + t) * (1.0 + t));
        }
    }
    throw std::invalid_argument("family4_limit: unknown case");
}

}  // namespace isoent
