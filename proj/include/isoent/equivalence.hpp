// isoent/equivalence.hpp
// Local-equivalence machinery: Bloch-vector Gram matrices of both reductions,
// the Gram-difference cost over permutations / qubit swap, fitting arbitrary
// iso-entangled bases into the General family, and the family classifier.

#pragma once

#include "isoent/families.hpp"
#include "isoent/optimize.hpp"
#include "isoent/rng.hpp"

#include <array>
#include <limits>

namespace isoent {

// ---------------------------------------------------------------------------
// Gram matrices of the reductions

struct GramPair {
    Eigen::Matrix4d gA, gB;
};

struct BlochPair {
    std::array<BlochVector, 4> vA, vB;
};

inline BlochPair reduction_blochs(const Basis& b) {
    const Mat c = b.computational();
    BlochPair out;
    for (int j = 0; j < 4; ++j) {
        Mat rho = outer(c.col(j));
        out.vA[j] = bloch_vector(partial_trace(rho, 2, 2, Subsys::A));
        out.vB[j] = bloch_vector(partial_trace(rho, 2, 2, Subsys::B));
    }
    return out;
}

inline GramPair reduction_grams(const Basis& b) {
    const BlochPair v = reduction_blochs(b);
    GramPair g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            g.gA(i, j) = v.vA[i].dot(v.vA[j]);
            g.gB(i, j) = v.vB[i].dot(v.vB[j]);
        }
    return g;
}

// all 24 permutations of {0,1,2,3} in lexicographic order
inline const std::array<std::array<int, 4>, 24>& permutations4() {
    static const std::array<std::array<int, 4>, 24> perms = [] {
        std::array<std::array<int, 4>, 24> out{};
        std::array<int, 4> p{0, 1, 2, 3};
        int k = 0;
        do {
            out[k++] = p;
        } while (std::next_permutation(p.begin(), p.end()));
        return out;
    }();
    return perms;
}

namespace detail {

inline double gram_cost_perm(const GramPair& g, const GramPair& h, const std::array<int, 4>& sigma,
                             bool swapped) {
    const Eigen::Matrix4d& ha = swapped ? h.gB : h.gA;
    const Eigen::Matrix4d& hb = swapped ? h.gA : h.gB;
    double cost = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double da = g.gA(i, j) - ha(sigma[i], sigma[j]);
            const double db = g.gB(i, j) - hb(sigma[i], sigma[j]);
            cost += da * da + db * db;
        }
    return cost;
}

struct BestPerm {
    double cost = std::numeric_limits<double>::infinity();
    int perm_index = 0;
    bool swapped = false;
};

// exhaustive enumeration of the 24 x 2 inner problems; deterministic
// tie-break: lexicographic permutation index, then swapped = false first
inline BestPerm best_gram_match(const GramPair& g, const GramPair& h) {
    BestPerm best;
    const auto& perms = permutations4();
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < 24; ++k) {
            const double c = gram_cost_perm(g, h, perms[k], s == 1);
            if (c < best.cost) {
                best.cost = c;
                best.perm_index = k;
                best.swapped = (s == 1);
            }
        }
    return best;
}

}  // namespace detail

// SM-style cost: sum of squared Gram differences with candidate columns
// permuted by sigma; when swapped, the candidate's A and B grams trade roles.
inline double gram_cost(const Basis& b1, const Basis& b2, const std::array<int, 4>& sigma,
                        bool swapped) {
    return detail::gram_cost_perm(reduction_grams(b1), reduction_grams(b2), sigma, swapped);
}

// ---------------------------------------------------------------------------
// SO(3) alignment and its SU(2) lift

namespace detail {

inline Eigen::Matrix3d kabsch(const std::array<BlochVector, 4>& target,
                              const std::array<BlochVector, 4>& source) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 4; ++i) {
        Eigen::Vector3d t(target[i].x, target[i].y, target[i].z);
        Eigen::Vector3d s(source[i].x, source[i].y, source[i].z);
        m += t * s.transpose();
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() > 0 ? 1.0 : -1.0;
    return svd.matrixU() * d * svd.matrixV().transpose();
}

// SU(2) element with U (v.sigma) U^dag = (R v).sigma, via the quaternion of R
inline Mat su2_from_rotation(const Eigen::Matrix3d& r) {
    double q0, q1, q2, q3;
    const double tr = r.trace();
    if (tr > 0) {
        double s = std::sqrt(tr + 1.0) * 2.0;
        q0 = 0.25 * s;
        q1 = (r(2, 1) - r(1, 2)) / s;
        q2 = (r(0, 2) - r(2, 0)) / s;
        q3 = (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
        q0 = (r(2, 1) - r(1, 2)) / s;
        q1 = 0.25 * s;
        q2 = (r(0, 1) + r(1, 0)) / s;
        q3 = (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
        q0 = (r(0, 2) - r(2, 0)) / s;
        q1 = (r(0, 1) + r(1, 0)) / s;
        q2 = 0.25 * s;
        q3 = (r(1, 2) + r(2, 1)) / s;
    } else {
        double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
        q0 = (r(1, 0) - r(0, 1)) / s;
        q1 = (r(0, 2) + r(2, 0)) / s;
        q2 = (r(1, 2) + r(2, 1)) / s;
        q3 = 0.25 * s;
    }
    const cplx i(0, 1);
    Mat u(2, 2);
    u << q0 - i * q3, -i * q1 - q2, -i * q1 + q2, q0 + i * q3;
    return u;
}

}  // namespace detail

struct Alignment {
    Mat uA, uB;  // 2x2 local unitaries
    double residual = std::numeric_limits<double>::infinity();
};

// Explicit local-unitary alignment of candidate onto target: target column i
// is compared with (uA (x) uB) S candidate column sigma(i). Gram equality is
// necessary evidence only; this is the sufficiency check.
inline Alignment align_local(const Basis& target, const Basis& candidate,
                             const std::array<int, 4>& sigma, bool swapped) {
    Mat cand = candidate.computational();
    if (swapped) cand = swap_gate() * cand;
    Mat permuted(4, 4);
    for (int i = 0; i < 4; ++i) permuted.col(i) = cand.col(sigma[i]);

    const Basis permuted_basis = make_basis(permuted);
    const BlochPair tv = reduction_blochs(target);
    const BlochPair sv = reduction_blochs(permuted_basis);
    const Eigen::Matrix3d ra = detail::kabsch(tv.vA, sv.vA);
    const Eigen::Matrix3d rb = detail::kabsch(tv.vB, sv.vB);

    Alignment out;
    out.uA = detail::su2_from_rotation(ra);
    out.uB = detail::su2_from_rotation(rb);
    const Mat aligned = kron(out.uA, out.uB) * permuted;
    // column-wise ray infidelity; column phases are gauge
    out.residual = projective_basis_infidelity(target.computational(), aligned);
    return out;
}

// ---------------------------------------------------------------------------
// fitting into the General family

struct EquivalenceReport {
    double cost = std::numeric_limits<double>::infinity();
    std::array<int, 4> permutation{0, 1, 2, 3};
    bool swapped = false;
    GeneralParams fitted;
    bool accepted = false;        // cost <= 1e-12 and alignment residual <= 1e-8
    bool gram_candidate = false;  // cost <= 1e-8, the loose numerical-match tier
    double align_residual = std::numeric_limits<double>::infinity();
};

inline constexpr double kFitThreshold = 1e-12;       // acceptance threshold for F
inline constexpr double kFitCandidateTier = 1e-8;    // loose numerical-match tier
inline constexpr double kAlignThreshold = 1e-8;

// Canonical parameter branch. The Gram pair of the General family is
// invariant (up to column permutation) under sign flips and half-period
// shifts of each angle separately, so fitted parameters are reported with
// delta in [-pi/4, 0], theta and beta in [0, pi/2].
inline GeneralParams canonical_general_branch(GeneralParams p) {
    p.delta = -std::abs(std::remainder(p.delta, pi / 2.0));
    p.theta = std::abs(std::remainder(p.theta, pi));
    if (p.theta > pi / 2.0) p.theta = pi - p.theta;
    p.beta = std::abs(std::remainder(p.beta, pi));
    if (p.beta > pi / 2.0) p.beta = pi - p.beta;
    return p;
}

namespace detail {

struct GramObjective {
    const GramPair& target;
    int sign;

    double operator()(const std::vector<double>& x) const {
        GeneralParams p{x[0], x[1], x[2], sign};  // delta, theta, beta
        try {
            const GramPair h = reduction_grams(gen_family(FamilyParams{p}));
            return best_gram_match(target, h).cost;
        } catch (const SingularConstraint&) {
            return 1e6;
        }
    }
};

struct FitCandidate {
    double cost = std::numeric_limits<double>::infinity();
    int perm_index = 0;
    bool swapped = false;
    GeneralParams params;
    double align = std::numeric_limits<double>::infinity();

    bool aligned_ok() const { return cost <= kFitThreshold && align <= kAlignThreshold; }
};

// preference: aligned fits first, then lower cost, then lexicographic
// permutation index, then swapped = false (the deterministic merge order)
inline bool prefer(const FitCandidate& a, const FitCandidate& b) {
    if (a.aligned_ok() != b.aligned_ok()) return a.aligned_ok();
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.align != b.align) return a.align < b.align;
    if (a.perm_index != b.perm_index) return a.perm_index < b.perm_index;
    return !a.swapped && b.swapped;
}

// Gram equality is necessary evidence only, so alignment is checked over
// every permutation/swap whose cost ties the optimum.
inline void evaluate_alignment(const Basis& b, const GramPair& target, FitCandidate& c) {
    if (c.cost > kFitCandidateTier) return;
    Basis cand;
    GramPair h;
    try {
        cand = gen_family(FamilyParams{c.params});
        h = reduction_grams(cand);
    } catch (const SingularConstraint&) {
        return;
    }
    const auto& perms = permutations4();
    double best_align = std::numeric_limits<double>::infinity();
    int best_perm = c.perm_index;
    bool best_swap = c.swapped;
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < 24; ++k) {
            if (gram_cost_perm(target, h, perms[k], s == 1) > c.cost + 1e-10) continue;
            const Alignment al = align_local(b, cand, perms[k], s == 1);
            if (al.residual < best_align) {
                best_align = al.residual;
                best_perm = k;
                best_swap = (s == 1);
            }
        }
    c.align = best_align;
    c.perm_index = best_perm;
    c.swapped = best_swap;
}

}  // namespace detail

// Multistart derivative-free fit of b into the General family: Nelder-Mead
// over (delta, theta, beta) with the 24 x 2 permutation/swap enumeration
// inside the objective and both phase-sign branches, followed by a
// least-squares polish and the explicit local-unitary alignment check.
inline EquivalenceReport fit_to_general(
    const Basis& b, int starts = 32,
    const std::vector<std::array<double, 3>>& extra_seeds = {}) {
    if (iso_residuals(b).max_abs() > tol::iso_gate)
        throw NotIsoEntangled("fit_to_general: input basis is not iso-entangled at 1e-8");

    const GramPair target = reduction_grams(b);
    detail::FitCandidate best;

    // evaluate a parameter point as-is (used for caller-provided seeds that
    // sit in regions too steep for the simplex search)
    auto consider_direct = [&](int sign, const std::vector<double>& x) {
        const GeneralParams raw{x[0], x[1], x[2], sign};
        for (const GeneralParams& q : {canonical_general_branch(raw), raw}) {
            detail::FitCandidate c;
            c.params = q;
            GramPair hq;
            try {
                hq = reduction_grams(gen_family(FamilyParams{q}));
            } catch (const SingularConstraint&) {
                continue;
            }
            const auto m = detail::best_gram_match(target, hq);
            c.cost = m.cost;
            c.perm_index = m.perm_index;
            c.swapped = m.swapped;
            detail::evaluate_alignment(b, target, c);
            if (detail::prefer(c, best)) best = c;
            if (best.aligned_ok()) break;
        }
    };

    auto consider = [&](int sign, const std::vector<double>& x) {
        detail::GramObjective obj{target, sign};
        auto nm = nelder_mead(obj, x, 0.3, 1e-18, 1e-9, 700);
        GeneralParams p{nm.x[0], nm.x[1], nm.x[2], sign};
        GramPair h;
        try {
            h = reduction_grams(gen_family(FamilyParams{p}));
        } catch (const SingularConstraint&) {
            return;
        }
        const auto match = detail::best_gram_match(target, h);
        const auto sigma = permutations4()[match.perm_index];
        // least-squares polish with fixed permutation / swap / sign
        auto resid = [&](const std::vector<double>& y) {
            GeneralParams q{y[0], y[1], y[2], sign};
            GramPair hh;
            try {
                hh = reduction_grams(gen_family(FamilyParams{q}));
            } catch (const SingularConstraint&) {
                return std::vector<double>(32, 1e3);
            }
            std::vector<double> r;
            r.reserve(32);
            const Eigen::Matrix4d& ha = match.swapped ? hh.gB : hh.gA;
            const Eigen::Matrix4d& hb = match.swapped ? hh.gA : hh.gB;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    r.push_back(target.gA(i, j) - ha(sigma[i], sigma[j]));
                    r.push_back(target.gB(i, j) - hb(sigma[i], sigma[j]));
                }
            return r;
        };
        auto lm = levenberg_marquardt(resid, nm.x, 40);

        // evaluate the polished point in the canonical branch first
        const GeneralParams raw{lm.x[0], lm.x[1], lm.x[2], sign};
        for (const GeneralParams& q : {canonical_general_branch(raw), raw}) {
            detail::FitCandidate c;
            c.params = q;
            GramPair hq;
            try {
                hq = reduction_grams(gen_family(FamilyParams{q}));
            } catch (const SingularConstraint&) {
                continue;
            }
            const auto m = detail::best_gram_match(target, hq);
            c.cost = m.cost;
            c.perm_index = m.perm_index;
            c.swapped = m.swapped;
            detail::evaluate_alignment(b, target, c);
            if (detail::prefer(c, best)) best = c;
            if (best.aligned_ok()) break;
        }
    };

    // all caller seeds are first taken at face value; the simplex search only
    // starts once no seed is already an aligned optimum
    for (const auto& s : extra_seeds) {
        for (int sign : {+1, -1}) {
            if (best.aligned_ok()) break;
            consider_direct(sign, {s[0], s[1], s[2]});
        }
    }
    for (const auto& s : extra_seeds) {
        for (int sign : {+1, -1}) {
            if (best.aligned_ok()) break;
            consider(sign, {s[0], s[1], s[2]});
        }
    }
    Rng rng(0x150EA57D5EEDULL);
    for (int k = 0; k < starts && !best.aligned_ok(); ++k) {
        std::vector<double> x{rng.next_angle(), rng.next_angle(), rng.next_angle()};
        for (int sign : {+1, -1}) consider(sign, x);
    }

    EquivalenceReport rep;
    if (std::isfinite(best.cost)) {
        rep.cost = best.cost;
        rep.permutation = permutations4()[best.perm_index];
        rep.swapped = best.swapped;
        rep.fitted = best.params;
        rep.align_residual = best.align;
        rep.gram_candidate = best.cost <= kFitCandidateTier;
        rep.accepted = best.aligned_ok();
    }
    return rep;
}

// ---------------------------------------------------------------------------
// classification

enum class FamilyLabel { SkewedProduct, Elegant, Bell, General, NotIsoEntangled };

inline const char* to_string(FamilyLabel l) {
    switch (l) {
        case FamilyLabel::SkewedProduct: return "skewed-product";
        case FamilyLabel::Elegant: return "elegant";
        case FamilyLabel::Bell: return "bell";
        case FamilyLabel::General: return "general";
        case FamilyLabel::NotIsoEntangled: return "not-iso-entangled";
    }
    return "?";
}

struct ClassifyResult {
    FamilyLabel label = FamilyLabel::NotIsoEntangled;
    EquivalenceReport report;
};

inline constexpr double kGeomTol = 1e-8;

namespace detail {

inline const std::array<std::array<int, 4>, 3>& pairings() {
    // the three ways to split {0,1,2,3} into two pairs, as (i,j,k,l)
    static const std::array<std::array<int, 4>, 3> p{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
    return p;
}

// Bell rectangle signature: the Bloch vectors of any orthonormal basis sum to
// zero, so rectangles mean two antipodal pairs through the origin.
inline bool rectangle_signature(const std::array<BlochVector, 4>& v, const std::array<int, 4>& pr,
                                double tol_geom = kGeomTol) {
    return (v[pr[0]] + v[pr[1]]).norm() <= tol_geom && (v[pr[2]] + v[pr[3]]).norm() <= tol_geom;
}

// Elegant two-cone signature. Besides the Gram pair-swap symmetry (pairs on
// opposite cones with opposite azimuths), the two reductions must fit
// together the way the family does: the cone heights of the two sides sum to
// one, and the azimuthal twist between the pairs is opposite on the two
// sides. The pair-swap symmetry alone is shared by the General family.
inline bool pair_swap_symmetric(const Eigen::Matrix4d& g, const std::array<int, 4>& pr,
                                double tol_geom = kGeomTol) {
    const int i = pr[0], j = pr[1], k = pr[2], l = pr[3];
    return std::abs(g(i, k) - g(j, l)) <= tol_geom && std::abs(g(i, l) - g(j, k)) <= tol_geom;
}

struct ConeGeometry {
    double h = 0;         // common |height| of the cones
    double cos_twist = 0; // cosine of the azimuth between the two pairs
    bool valid = false;
};

inline ConeGeometry cone_geometry(const std::array<BlochVector, 4>& v,
                                  const std::array<int, 4>& pr) {
    ConeGeometry out;
    out.h = 0.5 * (v[pr[0]] + v[pr[1]]).norm();
    const double r2 = v[pr[0]].dot(v[pr[0]]);
    const double rho2 = r2 - out.h * out.h;
    if (rho2 < 1e-10) return out;  // degenerate cone, no twist defined
    out.cos_twist = (v[pr[0]].dot(v[pr[2]]) + out.h * out.h) / rho2;
    out.valid = true;
    return out;
}

inline bool two_cone_signature(const BlochPair& v, const GramPair& g,
                               const std::array<int, 4>& pr, double tol_geom = kGeomTol) {
    if (!pair_swap_symmetric(g.gA, pr, tol_geom) || !pair_swap_symmetric(g.gB, pr, tol_geom))
        return false;
    const ConeGeometry ca = cone_geometry(v.vA, pr);
    const ConeGeometry cb = cone_geometry(v.vB, pr);
    if (!ca.valid || !cb.valid) return false;
    if (std::abs(ca.h + cb.h - 1.0) > tol_geom) return false;
    return std::abs(ca.cos_twist + cb.cos_twist) <= tol_geom;
}

}  // namespace detail

// Decision procedure: iso gate, zero-tangle test, geometric signatures for
// the Bell and Elegant families, then the General-family fit as fallback.
inline ClassifyResult classify(const Basis& b, int starts = 32) {
    ClassifyResult out;
    if (iso_residuals(b).max_abs() > tol::iso_gate) {
        out.label = FamilyLabel::NotIsoEntangled;
        return out;
    }
    const auto xi = column_tangles(b);
    const double mean_tangle = (xi[0] + xi[1] + xi[2] + xi[3]) / 4.0;
    if (mean_tangle <= kGeomTol) {
        out.label = FamilyLabel::SkewedProduct;
        return out;
    }
    const BlochPair v = reduction_blochs(b);
    const GramPair g = reduction_grams(b);
    // a pair that is antipodal in reduction A need not be the one antipodal
    // in reduction B, so the pairings are searched independently
    auto any_rectangle = [](const std::array<BlochVector, 4>& vs) {
        for (const auto& pr : detail::pairings())
            if (detail::rectangle_signature(vs, pr)) return true;
        return false;
    };
    if (any_rectangle(v.vA) && any_rectangle(v.vB)) {
        out.label = FamilyLabel::Bell;
        return out;
    }
    for (const auto& pr : detail::pairings()) {
        if (detail::two_cone_signature(v, g, pr)) {
            out.label = FamilyLabel::Elegant;
            return out;
        }
    }
    out.report = fit_to_general(b, starts);
    out.label = out.report.gram_candidate ? FamilyLabel::General : FamilyLabel::NotIsoEntangled;
    return out;
}

// ---------------------------------------------------------------------------
// embedding of the interpolating family

struct EmbedRow {
    double phi = 0;
    double beta = 0, theta = 0, delta = 0;
    int sign = +1;
    double cost = std::numeric_limits<double>::infinity();
    bool accepted = false;
};

// Embedding curve of the interpolating family inside the General family,
// traced by continuation along phi in [0, pi/2]. The endpoints sit on the
// family boundary (phi = 0 on the Elegant limit, phi = pi/2 on the maximally
// entangled one), so those fits are seeded with near-boundary points.
inline std::vector<EmbedRow> embed_i5(int grid, int starts = 24) {
    if (grid < 2) throw std::invalid_argument("embed_i5: grid must be at least 2");
    std::vector<EmbedRow> rows;
    rows.reserve(grid);
    std::array<double, 3> prev{-pi / 4, pi / 4, pi / 4};  // the phi = 0 boundary point
    for (int k = 0; k < grid; ++k) {
        const double phi = (pi / 2) * k / (grid - 1);
        const double theta_line = (pi / 2 - phi) / 2;
        std::vector<std::array<double, 3>> seeds;
        seeds.push_back(prev);
        seeds.push_back({prev[0], theta_line, prev[2]});
        if (theta_line < 1e-3) {
            // near the maximally entangled corner the constraint surface is
            // extremely steep; hand the fitter admissible boundary points
            const double th = std::max(theta_line, 5e-7);
            seeds.push_back({-(pi / 4 - 1e-4), th, pi / 2 - 1e-14});
            seeds.push_back({prev[0], th, pi / 2 - 1e-9});
        }
        const Basis i5 = gen_family(I5Params{phi});
        const EquivalenceReport rep = fit_to_general(i5, starts, seeds);
        rows.push_back({phi, rep.fitted.beta, rep.fitted.theta, rep.fitted.delta,
                        rep.fitted.sign, rep.cost, rep.accepted});
        if (rep.accepted) prev = {rep.fitted.delta, rep.fitted.theta, rep.fitted.beta};
    }
    return rows;
}

}  // namespace isoent
