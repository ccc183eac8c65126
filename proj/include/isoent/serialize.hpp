// isoent/serialize.hpp
// JSON and CSV interchange. Output is emitted through fixed snprintf formats
// so identical inputs produce byte-identical files; parsing goes through
// nlohmann::json with strict key checking.

#pragma once

#include "isoent/equivalence.hpp"
#include "isoent/highdim.hpp"
#include "isoent/network.hpp"
#include "isoent/oracle.hpp"

#include <json.hpp>

#include <cstdio>
#include <set>
#include <sstream>

namespace isoent {

using nlohmann::json;

// 17 significant digits: enough to round-trip any double exactly
inline std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string num12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string cplx_pair(const cplx& z) {
    return "[" + num17(z.real()) + ", " + num17(z.imag()) + "]";
}

inline std::string matrix_json(const Mat& m) {
    std::string out = "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out += (j ? ", [" : "[");
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            out += (i ? ", " : "") + cplx_pair(m(i, j));
        out += "]";
    }
    return out + "]";
}

// columns of the computational-frame coefficient matrix, each an array of
// [re, im] pairs
inline std::string basis_json(const Basis& b) {
    const Mat c = b.computational();
    return "{\"dim\": " + std::to_string(c.rows()) + ", \"columns\": " + matrix_json(c) + "}";
}

// ---------------------------------------------------------------------------
// family parameters

inline std::string family_json(const FamilyParams& p) {
    struct Visitor {
        std::string operator()(const SkewedProductParams& q) const {
            return "{\"family\": \"skewed\", \"tau\": " + num17(q.tau) + "}";
        }
        std::string operator()(const ElegantParams& q) const {
            return "{\"family\": \"elegant\", \"theta\": " + num17(q.theta) +
                   ", \"zeta\": " + num17(q.zeta) + "}";
        }
        std::string operator()(const BellParams& q) const {
            return "{\"family\": \"bell\", \"delta\": " + num17(q.delta) +
                   ", \"zeta\": " + num17(q.zeta) + ", \"tau\": " + num17(q.tau) + "}";
        }
        std::string operator()(const GeneralParams& q) const {
            return "{\"family\": \"general\", \"delta\": " + num17(q.delta) +
                   ", \"theta\": " + num17(q.theta) + ", \"beta\": " + num17(q.beta) +
                   ", \"sign\": " + std::to_string(q.sign) + "}";
        }
        std::string operator()(const BellCanonicalParams& q) const {
            return "{\"family\": \"bell-canonical\", \"x\": " + num17(q.x) +
                   ", \"y\": " + num17(q.y) + ", \"z\": " + num17(q.z) +
                   ", \"phase_sign\": " + std::to_string(q.phase_sign) + "}";
        }
        std::string operator()(const I5Params& q) const {
            return "{\"family\": \"i5\", \"phi\": " + num17(q.phi) + "}";
        }
    };
    return std::visit(Visitor{}, p);
}

namespace detail {

inline void require_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& ctx) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument(ctx + ": unknown key '" + it.key() + "'");
}

inline double need_num(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_number())
        throw std::invalid_argument(ctx + ": missing numeric field '" + key + "'");
    return j[key].get<double>();
}

}  // namespace detail

inline FamilyParams parse_family(const json& j) {
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw std::invalid_argument("family params: need an object with a 'family' string");
    const std::string fam = j["family"].get<std::string>();
    using detail::need_num;
    using detail::require_keys;
    if (fam == "skewed") {
        require_keys(j, {"family", "tau"}, "skewed");
        return SkewedProductParams{need_num(j, "tau", "skewed")};
    }
    if (fam == "elegant") {
        require_keys(j, {"family", "theta", "zeta"}, "elegant");
        return ElegantParams{need_num(j, "theta", "elegant"), need_num(j, "zeta", "elegant")};
    }
    if (fam == "bell") {
        require_keys(j, {"family", "delta", "zeta", "tau"}, "bell");
        return BellParams{need_num(j, "delta", "bell"), need_num(j, "zeta", "bell"),
                          need_num(j, "tau", "bell")};
    }
    if (fam == "general") {
        require_keys(j, {"family", "delta", "theta", "beta", "sign"}, "general");
        GeneralParams p{need_num(j, "delta", "general"), need_num(j, "theta", "general"),
                        need_num(j, "beta", "general")};
        if (j.contains("sign")) p.sign = j["sign"].get<int>() >= 0 ? 1 : -1;
        return p;
    }
    if (fam == "bell-canonical") {
        require_keys(j, {"family", "x", "y", "z", "phase_sign"}, "bell-canonical");
        BellCanonicalParams p{need_num(j, "x", "bell-canonical"),
                              need_num(j, "y", "bell-canonical"),
                              need_num(j, "z", "bell-canonical")};
        if (j.contains("phase_sign")) p.phase_sign = j["phase_sign"].get<int>() >= 0 ? 1 : -1;
        return p;
    }
    if (fam == "i5") {
        require_keys(j, {"family", "phi"}, "i5");
        return I5Params{need_num(j, "phi", "i5")};
    }
    throw std::invalid_argument("family params: unknown family '" + fam + "'");
}

// ---------------------------------------------------------------------------
// matrices and bases

inline Mat parse_matrix(const json& j) {
    const json& cols = (j.is_object() && j.contains("columns")) ? j["columns"] : j;
    if (!cols.is_array() || cols.empty())
        throw std::invalid_argument("matrix: expected an array of columns");
    const int n = static_cast<int>(cols.size());
    Mat m(n, n);
    for (int c = 0; c < n; ++c) {
        const json& col = cols[c];
        if (!col.is_array() || static_cast<int>(col.size()) != n)
            throw std::invalid_argument("matrix: ragged column " + std::to_string(c));
        for (int r = 0; r < n; ++r) {
            const json& e = col[r];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw std::invalid_argument("matrix: entries must be [re, im] pairs");
            m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

inline Vec parse_state(const json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("state: expected an array of [re, im] pairs");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        const json& e = j[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw std::invalid_argument("state: entries must be [re, im] pairs");
        v(i) = cplx(e[0].get<double>(), e[1].get<double>());
    }
    return v;
}

// ---------------------------------------------------------------------------
// reports

inline std::string iso_residuals_json(const IsoResiduals& r) {
    return "{\"r12\": " + num17(r.r12) + ", \"r34\": " + num17(r.r34) +
           ", \"r13\": " + num17(r.r13) + "}";
}

inline std::string report_json(const EquivalenceReport& r) {
    std::string perm = "[";
    for (int i = 0; i < 4; ++i) perm += (i ? ", " : "") + std::to_string(r.permutation[i]);
    perm += "]";
    return std::string("{") + "\"cost\": " + num17(r.cost) + ", \"permutation\": " + perm +
           ", \"swapped\": " + (r.swapped ? "true" : "false") +
           ", \"fitted\": {\"beta\": " + num17(r.fitted.beta) +
           ", \"theta\": " + num17(r.fitted.theta) + ", \"delta\": " + num17(r.fitted.delta) +
           ", \"sign\": " + std::to_string(r.fitted.sign) + "}" +
           ", \"align_residual\": " + num17(r.align_residual) +
           ", \"accepted\": " + (r.accepted ? "true" : "false") +
           ", \"gram_candidate\": " + (r.gram_candidate ? "true" : "false") + "}";
}

inline std::string canonicalization_json(const CanonicalizationResult& r) {
    std::string perm = "[";
    for (int i = 0; i < 4; ++i) perm += (i ? ", " : "") + std::to_string(r.permutation[i]);
    perm += "]";
    return std::string("{") + "\"params\": {\"alpha\": " + num17(r.params.alpha) +
           ", \"delta\": " + num17(r.params.delta) + ", \"theta\": " + num17(r.params.theta) +
           ", \"gamma\": " + num17(r.params.gamma) + ", \"beta\": " + num17(r.params.beta) +
           ", \"tau\": " + num17(r.params.tau) + "}" + ", \"u_a\": " + matrix_json(r.uA) +
           ", \"u_b\": " + matrix_json(r.uB) + ", \"permutation\": " + perm +
           ", \"residual\": " + num17(r.residual) + "}";
}

// ---------------------------------------------------------------------------
// triangle config

inline Mat parse_edge_state(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "psi+") return outer(bell_psi_plus());
        if (s == "psi-") return outer(bell_psi_minus());
        if (s == "phi+") return outer(bell_phi_plus());
        if (s == "phi-") return outer(bell_phi_minus());
        throw std::invalid_argument("edge_state: unknown name '" + s + "'");
    }
    return parse_matrix(j);
}

inline std::array<int, 6> parse_wiring(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "lexicographic") return kLexicographicWiring;
        if (s == "cyclic") return kCyclicWiring;
        throw std::invalid_argument("wiring: unknown name '" + s + "'");
    }
    if (!j.is_array() || j.size() != 6)
        throw std::invalid_argument("wiring: expected a name or a permutation of 6 slots");
    std::array<int, 6> w{};
    for (int i = 0; i < 6; ++i) w[i] = j[i].get<int>();
    validate_wiring(w);
    return w;
}

// solver survey rows as JSON arrays [seed, residual, label, cost]
inline std::string solver_runs_json(const std::vector<SolverRun>& runs) {
    std::string out = "[";
    bool first = true;
    for (const auto& r : runs) {
        out += first ? "" : ", ";
        first = false;
        out += "[" + std::to_string(r.seed) + ", " + num17(r.residual) + ", \"" +
               to_string(r.label) + "\", " + num17(r.cost) + "]";
    }
    return out + "]";
}

inline std::string latin_csv(const LatinSquare& ls) {
    std::string out;
    for (int j = 0; j < ls.d; ++j) {
        for (int k = 0; k < ls.d; ++k) out += (k ? "," : "") + std::to_string(ls.at(j, k));
        out += "\n";
    }
    return out;
}

}  // namespace isoent
