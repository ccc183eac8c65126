// isoent command-line front end: generation, verification, classification,
// canonicalization, triangle-network scans, embedding fits and the
// higher-dimensional constructions. Emits plot-ready CSV and JSON only.
//
// Exit codes: 0 success, 2 invalid configuration or parameters, 3 invalid
// input data, 4 non-convergence.

#include "isoent/serialize.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace isoent;

namespace {

struct InputDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::invalid_argument("cannot open output file " + path);
        f << content;
    }
    fs::rename(tmp, target);  // single atomic publish
}

json load_json_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputDataError("cannot read input file " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw InputDataError("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

Basis load_basis_file(const std::string& path, double ortho_tol = 1e-8) {
    const json j = load_json_file(path);
    Mat m;
    try {
        m = parse_matrix(j);
    } catch (const std::exception& e) {
        throw InputDataError(std::string("bad basis file: ") + e.what());
    }
    if (m.rows() != 4) throw InputDataError("basis file must hold a 4x4 complex matrix");
    if (orthonormality_residual(m) > ortho_tol)
        throw InputDataError("input matrix is not orthonormal at 1e-8");
    return make_basis(std::move(m));
}

// layered option lookup: command-line flag wins, then the config document,
// then the default
struct Options {
    json cfg = json::object();
    CLI::App* cmd = nullptr;

    double num(const std::string& flag, const std::string& key, double dflt) const {
        if (cmd->count(flag)) return cmd->get_option(flag)->as<double>();
        if (cfg.contains(key)) return cfg[key].get<double>();
        return dflt;
    }
    int integer(const std::string& flag, const std::string& key, int dflt) const {
        if (cmd->count(flag)) return cmd->get_option(flag)->as<int>();
        if (cfg.contains(key)) return cfg[key].get<int>();
        return dflt;
    }
    std::string str(const std::string& flag, const std::string& key,
                    const std::string& dflt) const {
        if (cmd->count(flag)) return cmd->get_option(flag)->as<std::string>();
        if (cfg.contains(key)) return cfg[key].get<std::string>();
        return dflt;
    }
    bool has(const std::string& flag, const std::string& key) const {
        return cmd->count(flag) > 0 || cfg.contains(key);
    }
};

json load_config(CLI::App* cmd, const std::string& expected_command,
                 const std::set<std::string>& allowed_keys) {
    if (!cmd->count("--config")) return json::object();
    const std::string path = cmd->get_option("--config")->as<std::string>();
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read config file " + path);
    json cfg;
    try {
        f >> cfg;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("bad JSON config: ") + e.what());
    }
    if (!cfg.is_object()) throw std::invalid_argument("config must be a JSON object");
    if (cfg.contains("command") && cfg["command"].get<std::string>() != expected_command)
        throw std::invalid_argument("config is for command '" +
                                    cfg["command"].get<std::string>() + "', not '" +
                                    expected_command + "'");
    std::set<std::string> allowed = allowed_keys;
    allowed.insert("command");
    detail::require_keys(cfg, allowed, "config");
    return cfg;
}

std::uint64_t resolve_seed(const Options& opt, std::uint64_t dflt) {
    // precedence: explicit flag, then ISOENT_SEED, then config, then default
    if (opt.cmd->count("--seed"))
        return static_cast<std::uint64_t>(opt.cmd->get_option("--seed")->as<long long>());
    if (const char* env = std::getenv("ISOENT_SEED"))
        return static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
    if (opt.cfg.contains("seed")) return opt.cfg["seed"].get<std::uint64_t>();
    return dflt;
}

// ---------------------------------------------------------------------------

FamilyParams family_from_options(const Options& opt) {
    const std::string fam = opt.str("--family", "family", "");
    if (fam.empty()) throw std::invalid_argument("gen: --family is required");
    json doc;
    doc["family"] = fam;
    auto put = [&](const std::string& flag, const std::string& key) {
        if (opt.has(flag, key)) doc[key] = opt.num(flag, key, 0.0);
    };
    put("--tau", "tau");
    put("--theta", "theta");
    put("--zeta", "zeta");
    put("--delta", "delta");
    put("--beta", "beta");
    put("--x", "x");
    put("--y", "y");
    put("--z", "z");
    put("--phi", "phi");
    if (opt.has("--sign", "sign")) doc["sign"] = opt.integer("--sign", "sign", 1);
    if (opt.has("--phase-sign", "phase_sign"))
        doc["phase_sign"] = opt.integer("--phase-sign", "phase_sign", 1);
    // fill unspecified angles of the selected family with zero
    static const std::map<std::string, std::vector<std::string>> needed = {
        {"skewed", {"tau"}},
        {"elegant", {"theta", "zeta"}},
        {"bell", {"delta", "zeta", "tau"}},
        {"general", {"delta", "theta", "beta"}},
        {"bell-canonical", {"x", "y", "z"}},
        {"i5", {"phi"}},
    };
    auto it = needed.find(fam);
    if (it == needed.end()) throw std::invalid_argument("gen: unknown family '" + fam + "'");
    for (const auto& key : it->second)
        if (!doc.contains(key)) doc[key] = 0.0;
    return parse_family(doc);
}

int cmd_gen(const Options& opt) {
    const FamilyParams params = family_from_options(opt);
    // user-typed parameters get the practical singularity gate, so inputs
    // meant to hit the singular set (a ten-digit pi/2, say) are refused
    if (const auto* gp = std::get_if<GeneralParams>(&params))
        assert_general_nonsingular(gp->delta, gp->beta, kGeneralPracticalGate);
    const Basis b = gen_family(params);
    const auto tangles = column_tangles(b);
    std::string out = "{\n  \"family_params\": " + family_json(canonicalized(params)) + ",\n";
    out += "  \"closed_form_tangle\": " + num17(closed_form_tangle(params)) + ",\n";
    out += "  \"tangles\": [" + num17(tangles[0]) + ", " + num17(tangles[1]) + ", " +
           num17(tangles[2]) + ", " + num17(tangles[3]) + "],\n";
    out += "  \"orthonormality_residual\": " +
           num17(orthonormality_residual(b.computational())) + ",\n";
    out += "  \"iso_residuals\": " + iso_residuals_json(iso_residuals(b)) + ",\n";
    out += "  \"basis\": " + basis_json(b) + "\n}\n";
    write_output(opt.str("--out", "out", ""), out);
    return 0;
}

int cmd_tangle(const Options& opt) {
    const std::string path = opt.str("--in", "in", "");
    if (path.empty()) throw std::invalid_argument("tangle: --in is required");
    const json j = load_json_file(path);
    std::string out;
    const bool is_state = j.is_array() && !j.empty() && j[0].is_array() && j[0].size() == 2 &&
                          j[0][0].is_number();
    try {
        if (is_state) {
            Vec v = parse_state(j);
            out = "{\"tangle\": " + num17(tangle(v)) + "}\n";
        } else {
            Mat m = parse_matrix(j);
            if (m.rows() != 4) throw InputDataError("tangle: need a 4x4 matrix or a 4-state");
            out = "{\"tangles\": [";
            for (int c = 0; c < 4; ++c) out += (c ? ", " : "") + num17(tangle(m.col(c)));
            out += "]}\n";
        }
    } catch (const std::invalid_argument& e) {
        throw InputDataError(e.what());
    }
    write_output(opt.str("--out", "out", ""), out);
    return 0;
}

int cmd_check(const Options& opt) {
    const std::string path = opt.str("--in", "in", "");
    if (path.empty()) throw std::invalid_argument("check: --in is required");
    const double iso_tol = opt.num("--tol", "tol", tol::iso_gate);
    if (iso_tol <= 0) throw std::invalid_argument("check: --tol must be positive");
    const json j = load_json_file(path);
    Mat m;
    try {
        m = parse_matrix(j);
    } catch (const std::exception& e) {
        throw InputDataError(std::string("bad basis file: ") + e.what());
    }
    if (m.rows() != 4) throw InputDataError("check: need a 4x4 matrix");
    const Basis b = make_basis(m);
    const double on = orthonormality_residual(m);
    std::string out = "{\"orthonormality_residual\": " + num17(on);
    if (on <= 1e-6) {
        const IsoResiduals r = iso_residuals(b);
        out += ", \"iso_residuals\": " + iso_residuals_json(r);
        out += std::string(", \"iso_entangled\": ") +
               (r.max_abs() <= iso_tol ? "true" : "false");
    }
    out += "}\n";
    write_output(opt.str("--out", "out", ""), out);
    return 0;
}

int cmd_classify(const Options& opt) {
    const std::string path = opt.str("--in", "in", "");
    if (path.empty()) throw std::invalid_argument("classify: --in is required");
    const Basis b = load_basis_file(path);
    const int starts = opt.integer("--starts", "starts", 32);
    const ClassifyResult r = classify(b, starts);
    std::string out = std::string("{\"label\": \"") + to_string(r.label) + "\"";
    if (r.label == FamilyLabel::General) out += ", \"report\": " + report_json(r.report);
    out += "}\n";
    write_output(opt.str("--out", "out", ""), out);
    return 0;
}

int cmd_canonicalize(const Options& opt) {
    const std::string path = opt.str("--in", "in", "");
    if (path.empty()) throw std::invalid_argument("canonicalize: --in is required");
    const Basis b = load_basis_file(path);
    const CanonicalizationResult r = canonicalize(b);
    write_output(opt.str("--out", "out", ""), canonicalization_json(r) + "\n");
    return 0;
}

Basis basis_from_config_value(const json& v) {
    if (v.is_object() && v.contains("family")) return gen_family(parse_family(v));
    Mat m = parse_matrix(v);
    if (m.rows() != 4 || orthonormality_residual(m) > 1e-8)
        throw InputDataError("triangle: basis is not an orthonormal 4x4 matrix");
    return make_basis(std::move(m));
}

int cmd_triangle(const Options& opt) {
    TriangleConfig cfg = default_triangle_config();
    cfg.epsilon = opt.num("--eps", "epsilon", 0.0);
    const std::string edge = opt.str("--edge", "edge_state", "");
    if (!edge.empty())
        cfg.edge_state = parse_edge_state(opt.cmd->count("--edge") ? json(edge)
                                                                   : opt.cfg["edge_state"]);
    const std::string wiring = opt.str("--wiring", "wiring", "");
    if (!wiring.empty())
        cfg.wiring = parse_wiring(opt.cmd->count("--wiring") ? json(wiring)
                                                             : opt.cfg["wiring"]);
    if (opt.cmd->count("--basis")) {
        const Basis b = load_basis_file(opt.cmd->get_option("--basis")->as<std::string>());
        cfg.basisA = cfg.basisB = cfg.basisC = b;
    } else if (opt.cfg.contains("basis")) {
        cfg.basisA = cfg.basisB = cfg.basisC = basis_from_config_value(opt.cfg["basis"]);
    }
    if (opt.cfg.contains("basis_a")) cfg.basisA = basis_from_config_value(opt.cfg["basis_a"]);
    if (opt.cfg.contains("basis_b")) cfg.basisB = basis_from_config_value(opt.cfg["basis_b"]);
    if (opt.cfg.contains("basis_c")) cfg.basisC = basis_from_config_value(opt.cfg["basis_c"]);

    const TriangleDistribution d = triangle_distribution(cfg);
    const OPISummary s = opi_summary(d);
    std::vector<ScanRow> rows{
        {cfg.epsilon, s.p1, s.p2, s.p3, finner_margin(d), s.max_deviation}};
    write_output(opt.str("--out", "out", ""), scan_csv(rows));

    const std::string dist_out = opt.str("--dist-out", "dist_out", "");
    if (!dist_out.empty()) {
        std::string doc = "{\"p\": [";
        for (int i = 0; i < 64; ++i) doc += (i ? ", " : "") + num17(d.p[i]);
        doc += "]}\n";
        write_output(dist_out, doc);
    }
    return 0;
}

int cmd_scan(const Options& opt) {
    const std::string curve = opt.str("--curve", "curve", "");
    const int grid = opt.integer("--grid", "grid", 21);
    ScanCurve c;
    if (curve == "ejm-noise") c = ScanCurve::EjmNoise;
    else if (curve == "elegant-opi") c = ScanCurve::ElegantOpiSubfamily;
    else throw std::invalid_argument("scan: --curve must be ejm-noise or elegant-opi");
    write_output(opt.str("--out", "out", ""), scan_csv(scan_p1p3(c, grid)));
    return 0;
}

int cmd_embed(const Options& opt) {
    const int grid = opt.integer("--grid", "grid", 11);
    const int starts = opt.integer("--starts", "starts", 24);
    const auto rows = embed_i5(grid, starts);
    std::string out = "phi,beta,theta,delta,cost,accepted\n";
    for (const auto& r : rows) {
        out += num12(r.phi) + "," + num12(r.beta) + "," + num12(r.theta) + "," +
               num12(r.delta) + "," + num12(r.cost) + "," + (r.accepted ? "1" : "0") + "\n";
    }
    write_output(opt.str("--out", "out", ""), out);
    return 0;
}

int cmd_highdim(const Options& opt) {
    const int d = opt.integer("--d", "d", 0);
    if (d < 2) throw std::invalid_argument("highdim: --d must be at least 2");
    const std::string kind = opt.str("--kind", "kind", "robust");
    const std::string method_name = opt.str("--method", "method", "cyclic");
    if (kind != "robust" && kind != "flat")
        throw std::invalid_argument("highdim: --kind must be robust or flat");
    if (method_name != "cyclic" && method_name != "seeded")
        throw std::invalid_argument("highdim: --method must be cyclic or seeded");
    const std::uint64_t seed = resolve_seed(opt, 1);
    const LatinMethod method =
        method_name == "cyclic" ? LatinMethod::Cyclic : LatinMethod::Seeded;
    const LatinSquare ls = latin_square(d, method, seed);

    double chi_default = d <= 4 ? std::acos((2.0 - d) / 2.0) : pi / 2;
    const double chi = opt.num("--chi", "chi", chi_default);

    std::vector<Mat> mats;
    double a = 1.0 / d, bline = 1.0 / d;
    if (kind == "flat") {
        mats.assign(d, fourier_hadamard(d));
    } else {
        const RobustHadamard rh = robust_hadamard(d, chi);
        mats.assign(d, rh.matrix);
        a = rh.a;
        bline = rh.b;
    }
    const ShiftMultiplyBasis smb = shift_multiply(ls, mats);

    // trace orthogonality: tr(X^dag X') = d delta delta
    double trace_residual = 0;
    for (int p = 0; p < d * d; ++p)
        for (int q = 0; q < d * d; ++q) {
            const cplx t = (smb.ops[p].adjoint() * smb.ops[q]).trace();
            const double target = (p == q) ? d : 0.0;
            trace_residual = std::max(trace_residual, std::abs(t - cplx(target, 0)));
        }

    std::string out = "{\n";
    out += "  \"d\": " + std::to_string(d) + ",\n";
    out += "  \"kind\": \"" + kind + "\",\n";
    out += "  \"method\": \"" + method_name + "\",\n";
    out += "  \"seed\": " + std::to_string(seed) + ",\n";
    out += "  \"chi\": " + num17(chi) + ",\n";
    out += "  \"a\": " + num17(a) + ",\n";
    out += "  \"b\": " + num17(bline) + ",\n";
    out += "  \"unitary\": " + std::string(smb.unitary_flag ? "true" : "false") + ",\n";
    out += "  \"trace_gram_residual\": " + num17(trace_residual) + ",\n";
    out += "  \"vector_gram_residual\": " + num17(vectorized_gram_residual(smb)) + ",\n";
    out += "  \"latin\": [";
    for (int j = 0; j < d; ++j) {
        out += (j ? ", [" : "[");
        for (int k = 0; k < d; ++k) out += (k ? ", " : "") + std::to_string(ls.at(j, k));
        out += "]";
    }
    out += "],\n  \"schmidt_spectra\": [";
    for (int p = 0; p < d * d; ++p) {
        const auto s = schmidt_spectrum(vectorize(smb.ops[p]), d);
        out += (p ? ", [" : "[");
        for (int i = 0; i < d; ++i) out += (i ? ", " : "") + num17(s[i]);
        out += "]";
    }
    out += "],\n  \"operators\": [";
    for (int p = 0; p < d * d; ++p) out += (p ? ", " : "") + matrix_json(smb.ops[p]);
    out += "],\n  \"vectorized\": [";
    for (int p = 0; p < d * d; ++p) {
        const Vec v = vectorize(smb.ops[p]);
        out += (p ? ", [" : "[");
        for (int i = 0; i < d * d; ++i) out += (i ? ", " : "") + cplx_pair(v(i));
        out += "]";
    }
    out += "]\n}\n";
    write_output(opt.str("--out", "out", ""), out);

    const std::string latin_out = opt.str("--latin-out", "latin_out", "");
    if (!latin_out.empty()) write_output(latin_out, latin_csv(ls));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"iso-entangled two-qubit measurement bases: generation, classification,"
                 " triangle-network scans and higher-dimensional constructions"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        std::set<std::string> cfg_keys;
        int (*run)(const Options&);
    };
    std::vector<Sub> subs;

    auto add_common = [](CLI::App* c) {
        c->add_option("--config", "JSON config file (flags win over its values)");
        c->add_option("--out", "output file (stdout when omitted)");
    };

    {
        auto* c = app.add_subcommand("gen", "generate a family member basis");
        add_common(c);
        c->add_option("--family", "skewed | elegant | bell | general | bell-canonical | i5");
        for (const char* o : {"--tau", "--theta", "--zeta", "--delta", "--beta", "--x", "--y",
                              "--z", "--phi"})
            c->add_option(o);
        c->add_option("--sign");
        c->add_option("--phase-sign");
        subs.push_back({c,
                        {"family", "tau", "theta", "zeta", "delta", "beta", "x", "y", "z",
                         "phi", "sign", "phase_sign", "out"},
                        &cmd_gen});
    }
    {
        auto* c = app.add_subcommand("tangle", "tangle of a state or basis columns");
        add_common(c);
        c->add_option("--in", "JSON state (array of [re,im]) or 4x4 matrix");
        subs.push_back({c, {"in", "out"}, &cmd_tangle});
    }
    {
        auto* c = app.add_subcommand("check", "orthonormality and iso-entanglement residuals");
        add_common(c);
        c->add_option("--in", "JSON 4x4 matrix");
        c->add_option("--tol", "iso-entanglement gate (default 1e-8)");
        subs.push_back({c, {"in", "tol", "out"}, &cmd_check});
    }
    {
        auto* c = app.add_subcommand("classify", "family label of a basis");
        add_common(c);
        c->add_option("--in", "JSON 4x4 matrix");
        c->add_option("--starts", "multistart count for the fallback fit");
        subs.push_back({c, {"in", "starts", "out"}, &cmd_classify});
    }
    {
        auto* c = app.add_subcommand("canonicalize", "canonical local form of a basis");
        add_common(c);
        c->add_option("--in", "JSON 4x4 matrix");
        subs.push_back({c, {"in", "out"}, &cmd_canonicalize});
    }
    {
        auto* c = app.add_subcommand("triangle", "triangle-network distribution summary");
        add_common(c);
        c->add_option("--eps", "depolarizing strength on every edge");
        c->add_option("--edge", "psi+ | psi- | phi+ | phi-");
        c->add_option("--wiring", "lexicographic | cyclic");
        c->add_option("--basis", "JSON matrix file used for all three parties");
        c->add_option("--dist-out", "write the full 64-outcome distribution JSON here");
        subs.push_back({c,
                        {"epsilon", "edge_state", "wiring", "basis", "basis_a", "basis_b",
                         "basis_c", "dist_out", "out"},
                        &cmd_triangle});
    }
    {
        auto* c = app.add_subcommand("scan", "p1/p3 curve data");
        add_common(c);
        c->add_option("--curve", "ejm-noise | elegant-opi");
        c->add_option("--grid", "number of rows");
        subs.push_back({c, {"curve", "grid", "out"}, &cmd_scan});
    }
    {
        auto* c = app.add_subcommand("embed", "fit the interpolating family into the general one");
        add_common(c);
        c->add_option("--grid", "number of phi values in [0, pi/2]");
        c->add_option("--starts", "multistart count per fit");
        subs.push_back({c, {"grid", "starts", "out"}, &cmd_embed});
    }
    {
        auto* c = app.add_subcommand("highdim", "shift-and-multiply bases in dimension d");
        add_common(c);
        c->add_option("--d", "local dimension");
        c->add_option("--kind", "robust | flat");
        c->add_option("--chi", "robust Hadamard eigenphase");
        c->add_option("--method", "cyclic | seeded Latin square");
        c->add_option("--seed", "seed for the seeded method");
        c->add_option("--latin-out", "write the Latin square CSV here");
        subs.push_back({c,
                        {"d", "kind", "chi", "method", "seed", "latin_out", "out"},
                        &cmd_highdim});
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    for (const auto& sub : subs) {
        if (!sub.cmd->parsed()) continue;
        try {
            Options opt;
            opt.cmd = sub.cmd;
            opt.cfg = load_config(sub.cmd, sub.cmd->get_name(), sub.cfg_keys);
            return sub.run(opt);
        } catch (const SingularConstraint& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        } catch (const PhaseInfeasible& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        } catch (const NonConvergence& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 4;
        } catch (const DegenerateSubspace& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 4;
        } catch (const NotIsoEntangled& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        } catch (const InputDataError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        } catch (const std::domain_error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        } catch (const json::exception& e) {
            std::cerr << "error: bad value in configuration: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    return 2;
}
