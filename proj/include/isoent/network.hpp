// isoent/network.hpp
// Triangle-network simulator. Three parties pairwise share a two-qubit state;
// each performs the joint measurement given by a basis on its two qubits.
// The 64-outcome distribution is computed by exact dense contraction in the
// 64-dimensional edge space; no sampling anywhere.
//
// Conventions (also configurable through the wiring permutation):
//   * edge order AB, AC, BC; inside an edge the lexicographically first party
//     holds the first qubit, so the state factor order is
//     [A1, B1, A2, C1, B2, C2];
//   * each party's first measured qubit comes from its lexicographically
//     first edge (A: AB, B: AB, C: AC), giving the default wiring
//     {0, 2, 1, 4, 3, 5} from measurement slots [A1,A2,B1,B2,C1,C2].

#pragma once

#include "isoent/families.hpp"

#include <array>
#include <string>

namespace isoent {

inline constexpr std::array<int, 6> kLexicographicWiring{0, 2, 1, 4, 3, 5};

// Rotation-symmetric wiring: each party's first qubit comes from the edge
// shared with its cyclic successor (A: AB, B: BC, C: CA). This is the wiring
// under which the output-permutation-invariant measurements below actually
// produce OPI distributions; the lexicographic wiring breaks the threefold
// symmetry of the triangle.
inline constexpr std::array<int, 6> kCyclicWiring{0, 2, 4, 1, 3, 5};

struct TriangleConfig {
    Basis basisA, basisB, basisC;
    Mat edge_state;  // 4x4 density matrix shared on every edge
    double epsilon = 0.0;
    std::array<int, 6> wiring = kLexicographicWiring;
};

struct TriangleDistribution {
    std::array<double, 64> p{};
    // outcomes are 0-based here; (a, b, c) in {0..3}^3
    double operator()(int a, int b, int c) const { return p[16 * a + 4 * b + c]; }
    double& at(int a, int b, int c) { return p[16 * a + 4 * b + c]; }
    double sum() const {
        double s = 0;
        for (double v : p) s += v;
        return s;
    }
};

// depolarizing channel (1 - eps) rho + eps/4 I
inline Mat depolarize(const Mat& rho, double eps) {
    if (eps < 0.0 || eps > 1.0) throw std::domain_error("depolarize: eps outside [0, 1]");
    if (rho.rows() != 4 || rho.cols() != 4)
        throw std::invalid_argument("depolarize: edge state must be 4x4");
    return (1.0 - eps) * rho + (eps / 4.0) * Mat::Identity(4, 4);
}

inline void validate_wiring(const std::array<int, 6>& w) {
    std::array<bool, 6> seen{};
    for (int s : w) {
        if (s < 0 || s >= 6 || seen[s]) throw std::invalid_argument("wiring is not a permutation");
        seen[s] = true;
    }
}

// Distribution with independently chosen edge states (the public config
// applies the same depolarized state to all three edges).
inline TriangleDistribution triangle_distribution(const Basis& basisA, const Basis& basisB,
                                                  const Basis& basisC, const Mat& rho_ab,
                                                  const Mat& rho_ac, const Mat& rho_bc,
                                                  const std::array<int, 6>& wiring) {
    validate_wiring(wiring);
    const Mat a = basisA.computational(), b = basisB.computational(), c = basisC.computational();
    for (const Mat* m : {&a, &b, &c})
        if (orthonormality_residual(*m) > 1e-8)
            throw std::invalid_argument("triangle: measurement basis not orthonormal");
    for (const Mat* r : {&rho_ab, &rho_ac, &rho_bc})
        if (r->rows() != 4 || r->cols() != 4)
            throw std::invalid_argument("triangle: edge state must be 4x4");

    const Mat rho = kron(rho_ab, kron(rho_ac, rho_bc));  // state order [A1,B1,A2,C1,B2,C2]

    // measurement-order index i -> state-order index j via the wiring
    std::array<int, 64> state_index{};
    for (int i = 0; i < 64; ++i) {
        int j = 0;
        for (int q = 0; q < 6; ++q) {
            const int bit = (i >> (5 - q)) & 1;
            j |= bit << (5 - wiring[q]);
        }
        state_index[i] = j;
    }

    TriangleDistribution out;
    Vec u(64);
    for (int oa = 0; oa < 4; ++oa)
        for (int ob = 0; ob < 4; ++ob)
            for (int oc = 0; oc < 4; ++oc) {
                const Vec v = kron(Vec(a.col(oa)), kron(Vec(b.col(ob)), Vec(c.col(oc))));
                for (int i = 0; i < 64; ++i) u(state_index[i]) = v(i);
                const double prob = std::real(u.dot(rho * u));
                out.at(oa, ob, oc) = prob;
            }
    return out;
}

inline TriangleDistribution triangle_distribution(const TriangleConfig& cfg) {
    const Mat edge = depolarize(cfg.edge_state, cfg.epsilon);
    return triangle_distribution(cfg.basisA, cfg.basisB, cfg.basisC, edge, edge, edge,
                                 cfg.wiring);
}

// ---------------------------------------------------------------------------
// output-permutation invariance

struct OPISummary {
    double p1 = 0, p2 = 0, p3 = 0;   // orbit means: aaa, aab-type, abc-type
    double max_deviation = 0;        // worst in-orbit spread
};

inline OPISummary opi_summary(const TriangleDistribution& d) {
    OPISummary s;
    double mn[3], mx[3], sum[3];
    int cnt[3] = {0, 0, 0};
    for (int k = 0; k < 3; ++k) {
        mn[k] = 1e300;
        mx[k] = -1e300;
        sum[k] = 0;
    }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                int orbit;
                if (a == b && b == c) orbit = 0;
                else if (a == b || b == c || a == c) orbit = 1;
                else orbit = 2;
                const double v = d(a, b, c);
                sum[orbit] += v;
                mn[orbit] = std::min(mn[orbit], v);
                mx[orbit] = std::max(mx[orbit], v);
                ++cnt[orbit];
            }
    s.p1 = sum[0] / cnt[0];
    s.p2 = sum[1] / cnt[1];
    s.p3 = sum[2] / cnt[2];
    s.max_deviation = std::max({mx[0] - mn[0], mx[1] - mn[1], mx[2] - mn[2]});
    return s;
}

// min over outcomes of sqrt(pA pB pC) - p(a,b,c); nonnegative means the
// Finner inequality holds
inline double finner_margin(const TriangleDistribution& d) {
    std::array<double, 4> pa{}, pb{}, pc{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                const double v = d(a, b, c);
                pa[a] += v;
                pb[b] += v;
                pc[c] += v;
            }
    double margin = 1e300;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                margin = std::min(margin, std::sqrt(pa[a] * pb[b] * pc[c]) - d(a, b, c));
    return margin;
}

// ---------------------------------------------------------------------------
// the OPI subfamily of the Elegant family

// One-parameter subset built from the six-angle parametrization under the
// Elegant-family condition (alpha = delta = pi/4, tau = 0) with
// gamma = arccos(-sin 2 theta)/2 and beta = gamma + pi/2. On the noiseless
// triple-Bell network state these measurements give OPI distributions.
inline Basis gen_elegant_opi(double theta) {
    const double gamma = 0.5 * std::acos(std::clamp(-std::sin(2.0 * theta), -1.0, 1.0));
    GeneralOrthParams p{pi / 4, pi / 4, theta, gamma, gamma + pi / 2, 0.0};
    Basis b = gen_general(p);
    return make_basis(b.computational());
}

// default network edge: |psi_+> = (|01> + |10>)/sqrt(2)
inline Mat default_edge_state() { return outer(bell_psi_plus()); }

inline TriangleConfig default_triangle_config() {
    TriangleConfig cfg;
    cfg.basisA = cfg.basisB = cfg.basisC = gen_elegant_opi(pi / 4);
    cfg.edge_state = default_edge_state();
    cfg.epsilon = 0.0;
    return cfg;
}

// Convention under which the gen_elegant_opi measurements give OPI
// distributions: (|00> + |11>)/sqrt(2) edges and the cyclic wiring. With
// these, the noiseless all-EJM network reproduces the known elegant
// distribution (p1, p2, p3) = (25, 1, 5)/256.
inline TriangleConfig opi_triangle_config() {
    TriangleConfig cfg;
    cfg.basisA = cfg.basisB = cfg.basisC = gen_elegant_opi(pi / 4);
    cfg.edge_state = outer(bell_phi_plus());
    cfg.epsilon = 0.0;
    cfg.wiring = kCyclicWiring;
    return cfg;
}

// ---------------------------------------------------------------------------
// scans for the p3-p1 curve data

enum class ScanCurve { EjmNoise, ElegantOpiSubfamily };

struct ScanRow {
    double param = 0, p1 = 0, p2 = 0, p3 = 0, finner = 0, max_deviation = 0;
};

// Both curves use the OPI convention (see opi_triangle_config) so they meet
// exactly at the noiseless EJM point.
inline std::vector<ScanRow> scan_p1p3(ScanCurve curve, int grid) {
    if (grid < 2) throw std::invalid_argument("scan_p1p3: grid must be at least 2");
    std::vector<ScanRow> rows;
    rows.reserve(grid);
    for (int k = 0; k < grid; ++k) {
        TriangleConfig cfg = opi_triangle_config();
        double param;
        if (curve == ScanCurve::EjmNoise) {
            param = static_cast<double>(k) / (grid - 1);
            cfg.epsilon = param;
        } else {
            param = (pi / 2) * k / (grid - 1);
            cfg.basisA = cfg.basisB = cfg.basisC = gen_elegant_opi(param);
        }
        const TriangleDistribution d = triangle_distribution(cfg);
        const OPISummary s = opi_summary(d);
        rows.push_back({param, s.p1, s.p2, s.p3, finner_margin(d), s.max_deviation});
    }
    return rows;
}

// CSV with 12 significant digits and LF line endings
inline std::string scan_csv(const std::vector<ScanRow>& rows) {
    std::string out = "param,p1,p2,p3,finner_margin,max_deviation\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.param, r.p1,
                      r.p2, r.p3, r.finner, r.max_deviation);
        out += buf;
    }
    return out;
}

}  // namespace isoent
