// tests/acceptance.cpp
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line; the
// process exits nonzero if any criterion fails.

#include "isoent/network.hpp"
#include "isoent/oracle.hpp"
#include "isoent/serialize.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace isoent;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(),
                detail.c_str());
    if (!ok) ++failures;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// --------------------------------------------------------------------------

void criterion_1_ejm_tangle() {
    // warm-up, then time a single generate-and-measure pass
    (void)column_tangles(gen_family(ElegantParams{pi / 4, pi / 2}));
    const auto t0 = std::chrono::steady_clock::now();
    const Basis b = gen_family(ElegantParams{pi / 4, pi / 2});
    const auto tangles = column_tangles(b);
    const double elapsed = ms_since(t0);
    double worst = 0;
    for (double t : tangles) worst = std::max(worst, std::abs(t - 0.25));
    report(1, worst <= 1e-12 && elapsed < 1.0, "EJM tangles equal 1/4",
           "max |xi - 1/4| = " + fmt(worst) + ", " + fmt(elapsed) + " ms");
}

void criterion_2_bsm_tangle() {
    const auto tangles = column_tangles(gen_family(BellParams{pi / 4, 0.0, pi / 2}));
    double worst = 0;
    for (double t : tangles) worst = std::max(worst, std::abs(t - 1.0));
    report(2, worst <= 1e-12, "BSM tangles equal 1", "max |xi - 1| = " + fmt(worst));
}

void criterion_3_closed_forms() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2026);
    double worst_cf = 0, worst_on = 0;
    for (int k = 0; k < 1000; ++k) {
        std::vector<FamilyParams> draws;
        draws.push_back(SkewedProductParams{rng.next_angle()});
        draws.push_back(ElegantParams{rng.next_angle(), rng.next_angle()});
        draws.push_back(BellParams{rng.next_angle(), rng.next_angle(), rng.next_angle()});
        GeneralParams gp{rng.next_angle(), rng.next_angle(), rng.next_angle(),
                         rng.next_double() < 0.5 ? 1 : -1};
        if (std::abs(std::sin(2 * gp.delta)) > 1e-6 && std::abs(std::cos(gp.beta)) > 1e-6)
            draws.push_back(gp);
        for (const auto& fp : draws) {
            const Basis b = gen_family(fp);
            const double cf = closed_form_tangle(fp);
            for (double t : column_tangles(b)) worst_cf = std::max(worst_cf, std::abs(t - cf));
            worst_on = std::max(worst_on, orthonormality_residual(b.computational()));
        }
    }
    const double elapsed = ms_since(t0);
    report(3, worst_cf <= 1e-10 && worst_on <= 1e-12 && elapsed < 5000.0,
           "closed-form tangles match numerics over 1000 draws per family",
           "tangle " + fmt(worst_cf) + ", orth " + fmt(worst_on) + ", " + fmt(elapsed) + " ms");
}

void criterion_4_elegant_bound() {
    double mx = 0;
    for (int i = 0; i < 10000; ++i) {
        const double theta = pi / 2 * i / 9999.0;
        mx = std::max(mx, closed_form_tangle(ElegantParams{theta, 0.3}));
    }
    report(4, mx <= 0.25 + 1e-12 && mx >= 0.25 - 1e-6,
           "elegant tangle attains but never exceeds 1/4", "max = " + fmt(mx));
}

void criterion_5_general_limit() {
    const double theta = 0.7, delta = 0.5;
    const double limit = std::pow(std::cos(theta) * std::sin(2 * delta), 2);
    double prev = 1e300, last = 0;
    bool monotone = true;
    for (int k = 1; k <= 6; ++k) {
        const Basis b = gen_family(GeneralParams{delta, theta, pi / 2 - std::pow(10.0, -k), 1});
        last = std::abs(column_tangles(b)[0] - limit);
        monotone = monotone && last < prev;
        prev = last;
    }
    report(5, monotone && last <= 1e-8,
           "beta -> pi/2 tangle converges to cos^2(theta) sin^2(2 delta)",
           std::string(monotone ? "monotone" : "non-monotone") + ", err(k=6) = " + fmt(last));
}

void criterion_6_embedding() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = embed_i5(11, 24);
    const double elapsed = ms_since(t0);
    double worst_cost = 0, worst_line = 0;
    bool all_ok = true;
    for (const auto& r : rows) {
        worst_cost = std::max(worst_cost, r.cost);
        // the linear law of the embedding curve lives on the theta angle of
        // this parametrization; its magnitude equals |(phi - pi/2)/2|
        const double line = (pi / 2 - r.phi) / 2;
        worst_line = std::max(worst_line, std::abs(std::abs(r.theta) - line));
        all_ok = all_ok && r.accepted;
    }
    report(6,
           all_ok && worst_cost <= 1e-12 && worst_line <= 1e-6 && elapsed < 60000.0,
           "interpolating family embeds with cost <= 1e-12 and the linear angle law",
           "cost " + fmt(worst_cost) + ", |theta| vs |(phi-pi/2)/2| " + fmt(worst_line) + ", " +
               fmt(elapsed) + " ms");
}

void criterion_7_canonicalization() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(777);
    int ok = 0;
    double worst_resid = 0, worst_drift = 0;
    for (int k = 0; k < 100; ++k) {
        const GeneralOrthParams p{rng.next_angle(), rng.next_angle(), rng.next_angle(),
                                  rng.next_angle(), rng.next_angle(), rng.next_angle()};
        const Basis b = gen_general(p);
        const Mat disguised = kron(random_local(rng), random_local(rng)) * b.computational();
        try {
            const CanonicalizationResult r = canonicalize(make_basis(disguised));
            worst_resid = std::max(worst_resid, r.residual);
            const auto t_in = column_tangles(b);
            const auto t_out = column_tangles(gen_general(r.params));
            for (int j = 0; j < 4; ++j)
                worst_drift = std::max(worst_drift, std::abs(t_in[j] - t_out[j]));
            if (r.residual <= 1e-8) ++ok;
        } catch (const std::exception&) {
        }
    }
    const double elapsed = ms_since(t0);
    report(7, ok == 100 && worst_drift <= 1e-8 && elapsed < 30000.0,
           "100 disguised bases recover the canonical form",
           std::to_string(ok) + "/100, residual " + fmt(worst_resid) + ", tangle drift " +
               fmt(worst_drift) + ", " + fmt(elapsed) + " ms");
}

void criterion_8_triangle_sanity() {
    TriangleConfig cfg = default_triangle_config();
    cfg.epsilon = 1.0;
    const TriangleDistribution d = triangle_distribution(cfg);
    double uniform_dev = 0;
    for (double v : d.p) uniform_dev = std::max(uniform_dev, std::abs(v - 1.0 / 64));

    Rng rng(888);
    double worst_rule = 0;
    for (int k = 0; k < 100; ++k) {
        TriangleConfig c;
        c.basisA = make_basis(haar_unitary(4, rng.next_u64()));
        c.basisB = make_basis(haar_unitary(4, rng.next_u64()));
        c.basisC = make_basis(haar_unitary(4, rng.next_u64()));
        const std::array<Vec, 4> edges{bell_psi_plus(), bell_psi_minus(), bell_phi_plus(),
                                       bell_phi_minus()};
        c.edge_state = outer(edges[rng.next_u64() % 4]);
        c.epsilon = rng.next_double();
        c.wiring = (rng.next_u64() % 2) ? kCyclicWiring : kLexicographicWiring;
        const OPISummary s = opi_summary(triangle_distribution(c));
        worst_rule = std::max(worst_rule, std::abs(4 * s.p1 + 36 * s.p2 + 24 * s.p3 - 1.0));
    }
    report(8, uniform_dev <= 1e-12 && worst_rule <= 1e-10,
           "white noise is uniform and the orbit sum rule holds",
           "uniform dev " + fmt(uniform_dev) + ", sum-rule dev " + fmt(worst_rule));
}

void criterion_9_opi_subfamily() {
    double worst_dev = 0, min_finner = 1e300;
    for (int i = 0; i < 21; ++i) {
        const double theta = pi / 2 * i / 20.0;
        TriangleConfig cfg = opi_triangle_config();
        cfg.basisA = cfg.basisB = cfg.basisC = gen_elegant_opi(theta);
        const TriangleDistribution d = triangle_distribution(cfg);
        worst_dev = std::max(worst_dev, opi_summary(d).max_deviation);
        min_finner = std::min(min_finner, finner_margin(d));
    }
    TriangleConfig broken = opi_triangle_config();
    broken.basisA = broken.basisB = broken.basisC = gen_elegant_opi(pi / 6);
    broken.epsilon = 0.1;
    const double broken_dev = opi_summary(triangle_distribution(broken)).max_deviation;

    const auto noise = scan_p1p3(ScanCurve::EjmNoise, 11);
    const auto eleg = scan_p1p3(ScanCurve::ElegantOpiSubfamily, 21);
    for (const auto& r : noise) min_finner = std::min(min_finner, r.finner);
    for (const auto& r : eleg) min_finner = std::min(min_finner, r.finner);
    const bool anchored = std::abs(noise.front().p1 - eleg[10].p1) <= 1e-12 &&
                          std::abs(noise.front().p3 - eleg[10].p3) <= 1e-12;

    report(9,
           worst_dev <= 1e-9 && broken_dev > 1e-6 && min_finner >= -1e-12 && anchored,
           "OPI subfamily: invariant at zero noise, broken inside under noise",
           "dev " + fmt(worst_dev) + ", broken dev " + fmt(broken_dev) + ", finner " +
               fmt(min_finner) + (anchored ? ", curves anchored" : ", anchor broken"));
}

void criterion_10_completeness() {
    const auto t0 = std::chrono::steady_clock::now();
    int converged = 0, classified = 0;
    for (int s = 0; s < 100; ++s) {
        try {
            const Basis b = solve_iso_basis(31000 + s);
            ++converged;
            if (classify(b).label != FamilyLabel::NotIsoEntangled) ++classified;
        } catch (const NonConvergence&) {
        }
    }
    const double elapsed = ms_since(t0);
    report(10, converged >= 95 && classified == converged && elapsed < 300000.0,
           "solved iso-constraint bases all classify into the four families",
           std::to_string(converged) + "/100 converged, " + std::to_string(classified) +
               " classified, " + fmt(elapsed) + " ms");
}

void criterion_11_highdim() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_trace = 0, worst_gram = 0, worst_schmidt = 0;
    for (int d = 2; d <= 5; ++d) {
        const LatinSquare ls = latin_square(d, LatinMethod::Cyclic);
        const ShiftMultiplyBasis flat =
            shift_multiply(ls, std::vector<Mat>(d, fourier_hadamard(d)));
        for (int p = 0; p < d * d; ++p)
            for (int q = 0; q < d * d; ++q) {
                const cplx t = (flat.ops[p].adjoint() * flat.ops[q]).trace();
                const double target = p == q ? d : 0.0;
                worst_trace = std::max(worst_trace, std::abs(t - cplx(target, 0)));
            }
        const RobustHadamard rh = robust_hadamard(d, 0.8 + 0.2 * d);
        const ShiftMultiplyBasis rob = shift_multiply(ls, std::vector<Mat>(d, rh.matrix));
        worst_gram = std::max(worst_gram, vectorized_gram_residual(rob));
        for (int p = 0; p < d * d; ++p) {
            const auto s = schmidt_spectrum(vectorize(rob.ops[p]), d);
            worst_schmidt = std::max(worst_schmidt, std::abs(s[0] - std::sqrt(rh.a)));
            for (int i = 1; i < d; ++i)
                worst_schmidt = std::max(worst_schmidt, std::abs(s[i] - std::sqrt(rh.b)));
        }
    }
    const double elapsed = ms_since(t0);
    report(11,
           worst_trace <= 1e-10 && worst_gram <= 1e-10 && worst_schmidt <= 1e-10 &&
               elapsed < 10000.0,
           "shift-and-multiply bases for d in {2..5}",
           "trace " + fmt(worst_trace) + ", gram " + fmt(worst_gram) + ", schmidt " +
               fmt(worst_schmidt) + ", " + fmt(elapsed) + " ms");
}

#ifdef ISOENT_CLI_PATH
std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void criterion_12_determinism() {
    const std::string cli = ISOENT_CLI_PATH;
    const fs::path dir = fs::temp_directory_path() / "isoent_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    // one seed file used by the matrix-reading commands
    const fs::path ejm_file = dir / "ejm.json";
    {
        std::ofstream f(ejm_file, std::ios::binary);
        f << basis_json(gen_family(ElegantParams{pi / 4, pi / 2})) << "\n";
    }
    const std::string in = " --in " + ejm_file.string();
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"gen", " gen --family elegant --theta 0.7853981633974483 --zeta 1.5707963267948966"},
        {"tangle", " tangle" + in},
        {"check", " check" + in},
        {"classify", " classify" + in},
        {"canonicalize", " canonicalize" + in},
        {"triangle", " triangle --eps 0.25 --edge phi+ --wiring cyclic"},
        {"scan", " scan --curve ejm-noise --grid 5"},
        {"embed", " embed --grid 3 --starts 8"},
        {"highdim", " highdim --d 3 --method seeded --seed 12345"},
    };
    bool all_ok = true;
    std::string bad;
    for (const auto& [name, args] : commands) {
        const fs::path out1 = dir / (name + ".1"), out2 = dir / (name + ".2");
        const std::string base = cli + args + " --out ";
        if (std::system((base + out1.string()).c_str()) != 0 ||
            std::system((base + out2.string()).c_str()) != 0) {
            all_ok = false;
            bad += " " + name + "(run)";
            continue;
        }
        const std::string a = slurp(out1), b = slurp(out2);
        if (a.empty() || a != b) {
            all_ok = false;
            bad += " " + name + "(bytes)";
        }
    }
    report(12, all_ok, "CLI commands are byte-deterministic",
           all_ok ? "9 commands, two runs each" : ("mismatch:" + bad));

    // supplementary check of the exit-code contract (not a numbered criterion)
    const fs::path devnull = dir / "sink";
    auto code_of = [&](const std::string& args) {
        const int raw = std::system((cli + args + " --out " + devnull.string() +
                                     " 2> " + (dir / "err").string())
                                        .c_str());
        return WEXITSTATUS(raw);
    };
    const fs::path non_ortho = dir / "bad.json";
    {
        std::ofstream f(non_ortho, std::ios::binary);
        f << "[[[1,0],[0,0],[0,0],[0,0]],[[1,0],[0,0],[0,0],[0,0]],"
             "[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]]";
    }
    const bool codes_ok =
        code_of(" gen --family elegant --theta 0.3 --zeta 0.1") == 0 &&
        code_of(" gen --family general --delta 0.3 --theta 0.5 --beta 1.5707963268") == 2 &&
        code_of(" gen --family nope") == 2 &&
        code_of(" classify --in " + non_ortho.string()) == 3 &&
        code_of(" tangle --in " + (dir / "missing.json").string()) == 3;
    std::printf("%s exit-code contract: 0 ok, 2 bad params, 3 bad input\n",
                codes_ok ? "PASS" : "FAIL");
    if (!codes_ok) ++failures;
    fs::remove_all(dir);
}
#endif

}  // namespace

int main() {
    criterion_1_ejm_tangle();
    criterion_2_bsm_tangle();
    criterion_3_closed_forms();
    criterion_4_elegant_bound();
    criterion_5_general_limit();
    criterion_6_embedding();
    criterion_7_canonicalization();
    criterion_8_triangle_sanity();
    criterion_9_opi_subfamily();
    criterion_10_completeness();
    criterion_11_highdim();
#ifdef ISOENT_CLI_PATH
    criterion_12_determinism();
#endif
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all criteria passed\n");
    return failures == 0 ? 0 : 1;
}
