// Acceptance gate: twelve standalone criteria covering positivity of
// i[f(P), g(Q)] for strip-class pairs, the trace identity, the rank-n
// family, periodic commutation, the cosh-sandwich and Weyl routes, the
// coherent scan, the derivative inequalities, the variance formula,
// finite-rank reconstruction, cross-route agreement, and determinism.
// Each criterion prints one [acceptance] line and fails loudly on any
// violated bound.

#include "catch2/catch_amalgamated.hpp"
#include "commutatorlab/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace commlab;

namespace {

struct Gate {
    int number;
    const char* label;
    bool ok = true;

    Gate(int n, const char* l) : number(n), label(l) {}
    void expect(bool cond) { ok = ok && cond; }
    ~Gate() {
        const bool pass = ok && std::uncaught_exceptions() == 0;
        std::printf("[acceptance] criterion %02d (%s): %s\n", number, label, pass ? "PASS" : "FAIL");
        std::fflush(stdout);
    }
};

#define GATE_CHECK(gate, cond)                  \
    do {                                        \
        const bool gate_ok_ = static_cast<bool>(cond); \
        (gate).expect(gate_ok_);                \
        CHECK(gate_ok_);                        \
    } while (0)

KatoFunction mk(double a, std::vector<std::pair<double, double>> atoms, double c = 0.0) {
    KatoFunction f;
    f.a = a;
    f.c = c;
    f.measure.atoms = std::move(atoms);
    return f;
}

// The five shipped strip-class pairs with a b = pi/2.
std::vector<std::pair<KatoFunction, KatoFunction>> acceptance_pairs() {
    std::vector<std::pair<KatoFunction, KatoFunction>> pairs;
    pairs.emplace_back(single_step(1.2533141373155003), single_step(1.2533141373155003));
    pairs.emplace_back(single_step(1.0), single_step(pi / 2.0));
    pairs.emplace_back(mk(1.0, {{-1.0, 0.4}, {0.0, 0.3}, {1.5, 0.3}}), single_step(pi / 2.0));
    pairs.emplace_back(single_step(2.0), mk(pi / 4.0, {{-0.5, 0.5}, {0.3, 0.3}, {1.0, 0.2}}));
    pairs.emplace_back(mk(0.8, {{-1.2, 0.3}, {0.2, 0.4}, {1.1, 0.3}}),
                       mk(pi / 1.6, {{0.0, 0.6}, {-0.8, 0.2}, {0.9, 0.2}}));
    return pairs;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string scenario_dir() {
    if (const char* env = std::getenv("COMMUTATORLAB_SCENARIO_DIR")) return env;
    return "scenarios";
}

std::string cli_binary() {
    if (const char* env = std::getenv("COMMUTATORLAB_BIN")) return env;
    return "build/commutatorlab";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string strip_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("\"timestamp\"") == std::string::npos) out << line << "\n";
    }
    return out.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + cli_binary() + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return (rc != -1 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
}

const InequalityMargin& find_margin(const InequalityReport& rep, const std::string& name) {
    for (const auto& item : rep.items) {
        if (item.name == name) return item;
    }
    throw std::runtime_error("missing margin " + name);
}

} // namespace

TEST_CASE("criterion_01_kato_positivity") {
    Gate gate(1, "kato_positivity");
    const auto t0 = std::chrono::steady_clock::now();
    GridSpec grid(20.0, 512);
    for (const auto& [f, g] : acceptance_pairs()) {
        KernelMatrix km = nystrom_assemble(f, g, grid);
        PositivityReport rep = positivity_spectrum(km, total_variation(f) * total_variation(g) / (2.0 * pi));
        GATE_CHECK(gate, rep.min_eigenvalue >= -1e-8 * rep.top_eigenvalues.front());
        GATE_CHECK(gate, rep.top_eigenvalues.front() > 0.0);
    }
    GATE_CHECK(gate, seconds_since(t0) <= 30.0);
}

TEST_CASE("criterion_02_trace_identity") {
    Gate gate(2, "trace_identity");
    GridSpec grid(20.0, 512);
    bool first = true;
    for (const auto& [f, g] : acceptance_pairs()) {
        KernelMatrix km = nystrom_assemble(f, g, grid);
        TraceCheck tc = trace_check(f, g, km.M.trace().real());
        GATE_CHECK(gate, tc.rel_error <= 1e-6);
        GATE_CHECK(gate, tc.pass);
        if (first) {
            // unit-mass tanh pair: the expected trace is 2/pi
            GATE_CHECK(gate, std::abs(tc.expected - 2.0 / pi) < 1e-15);
            first = false;
        }
    }
}

TEST_CASE("criterion_03_rank_n_kernels") {
    Gate gate(3, "rank_n_kernels");
    GridSpec grid(18.0, 384);
    const double beta = 1.0;
    for (int n = 1; n <= 3; ++n) {
        const double alpha = pi * n / (2.0 * beta);
        KatoFunction f = single_step(pi / (2.0 * alpha));
        KatoFunction g = single_step(pi / (2.0 * beta));
        KernelMatrix km = nystrom_assemble(f, g, grid);

        // entrywise match against the closed form, relative to the scale
        double max_closed = 0.0, max_diff = 0.0;
        for (int j = 0; j < grid.N; ++j) {
            for (int k = 0; k < grid.N; ++k) {
                const double closed = grid.h() * tanh_rank_n_kernel(alpha, beta, n, grid.x(j), grid.x(k));
                max_closed = std::max(max_closed, std::abs(closed));
                max_diff = std::max(max_diff, std::abs(km.M(j, k) - complexd{closed, 0.0}));
            }
        }
        GATE_CHECK(gate, max_diff <= 1e-10 * max_closed);

        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(km.M);
        GATE_CHECK(gate, svd.singularValues()(n) <= 1e-8 * svd.singularValues()(0));

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (km.M + km.M.adjoint()));
        if (n == 1) {
            GATE_CHECK(gate, es.eigenvalues().minCoeff() >= -1e-8 * es.eigenvalues().maxCoeff());
        } else {
            GATE_CHECK(gate, es.eigenvalues().minCoeff() < 0.0);
        }
    }
}

TEST_CASE("criterion_04_det2x2_negative") {
    Gate gate(4, "det2x2_negative");
    const double beta = 1.0;
    const double alpha = pi; // 4 alpha beta = 2 pi n for n = 2
    const double x1 = 0.5, x2 = -0.5;
    const double det = det2x2_tanh(beta, 2, x1, x2);
    GATE_CHECK(gate, det < 0.0);
    const double k11 = tanh_rank_n_kernel(alpha, beta, 2, x1, x1);
    const double k22 = tanh_rank_n_kernel(alpha, beta, 2, x2, x2);
    const double k12 = tanh_rank_n_kernel(alpha, beta, 2, x1, x2);
    GATE_CHECK(gate, std::abs(det - (k11 * k22 - k12 * k12)) <= 1e-12);
}

TEST_CASE("criterion_05_periodic_commutation") {
    Gate gate(5, "periodic_commutation");
    PeriodicSpec exact;
    PeriodicCommuteReport rep = commute_check_periodic(exact);
    GATE_CHECK(gate, rep.relative <= 1e-10);

    PeriodicSpec detuned;
    detuned.mismatch = 0.1;
    PeriodicCommuteReport bad = commute_check_periodic(detuned);
    GATE_CHECK(gate, bad.relative >= 1e-3);
}

TEST_CASE("criterion_06_cosh_sandwich") {
    Gate gate(6, "cosh_sandwich");
    const auto t0 = std::chrono::steady_clock::now();
    GridSpec grid(24.0, 1024);
    KatoFunction g = single_step(2.0);
    KatoFunction f = single_step(pi / 2.0); // slope 1 = lambda
    OperatorMatrix S = cosh_sandwich(1.0, g, grid);
    OperatorMatrix C = commutator_matrix(build_fP(f, grid), build_gQ(g, grid));
    // compare after the zone-edge congruence on both routes
    BlockDistance d = interior_frobenius_diff(band_compress(S).M, band_compress(C).M, grid);
    GATE_CHECK(gate, d.relative <= 1e-6);
    GATE_CHECK(gate, seconds_since(t0) <= 60.0);
}

TEST_CASE("criterion_07_weyl_and_coherent") {
    Gate gate(7, "weyl_coherent");
    GridSpec grid(20.0, 512);
    KatoFunction f = single_step(1.2533141373155003);
    KatoFunction g = single_step(1.2533141373155003);
    OperatorMatrix W = weyl_representation(f, g, grid);
    OperatorMatrix C = commutator_matrix(build_fP(f, grid), build_gQ(g, grid));
    BlockDistance d = interior_frobenius_diff(band_compress(W).M, band_compress(C).M, grid);
    GATE_CHECK(gate, d.relative <= 1e-4);

    // coherent positivity field for the strip-class pair
    CoherentField field = coherent_scan(f, g, 6.0, 41);
    GATE_CHECK(gate, field.min_value >= -1e-8 * field.max_value);
    GATE_CHECK(gate, field.max_value > 0.0);

    // the shipped non-monotone bump family at its largest parameter
    Scenario bump = [] {
        std::ifstream in(scenario_dir() + "/bump_probe.json");
        json j;
        in >> j;
        return config_from_json(j).front();
    }();
    REQUIRE(bump.probe.has_value());
    const double eps = *std::max_element(bump.probe->parameters.begin(), bump.probe->parameters.end());
    GATE_CHECK(gate, eps > 0.0);
    KatoFunction fk = single_step(pi / 2.0);
    auto fhat = [&](double u) { return ft_measure(fk, u); };
    auto ghat = [&](double xi) {
        const double sigma = 0.35, x0 = 2.0;
        const complexd phase{std::cos(xi * x0), -std::sin(xi * x0)};
        return ft_measure(fk, xi) - eps * xi * xi * sigma * std::exp(-sigma * sigma * xi * xi / 2.0) * phase;
    };
    CoherentField bumpfield = coherent_scan_ft(fhat, ghat, 6.0, 41);
    GATE_CHECK(gate, bumpfield.min_value < 0.0);
}

TEST_CASE("criterion_08_inequality_suite") {
    Gate gate(8, "inequality_suite");

    // single atom: equality in the reflection floor and the second-order
    // (Riccati) bound within the stencil error estimate
    InequalityReport single = inequality_suite(single_step(1.0));
    GATE_CHECK(gate, single.all_pass);
    GATE_CHECK(gate, single.symmetric_center);
    const auto& refl = find_margin(single, "reflection_floor");
    GATE_CHECK(gate, refl.enabled);
    GATE_CHECK(gate, std::abs(refl.min_margin) <= 1e-8);
    const auto& second = find_margin(single, "second_order_bound");
    GATE_CHECK(gate, std::abs(second.min_margin) <= second.error_estimate);

    // three mixtures pass with strictly positive margins; the frozen values
    // are regression baselines for this build
    struct Frozen {
        KatoFunction g;
        double gradient, log_lip, curvature, tail;
    };
    std::vector<Frozen> cases;
    cases.push_back({mk(1.0, {{-0.7, 0.6}, {0.9, 0.4}}),
                     8.233732035431e-08, 2.117249652517e-01, 8.200393910305e-08, 4.179929696122e-08});
    cases.push_back({mk(0.75, {{-1.5, 0.25}, {0.0, 0.5}, {2.0, 0.25}}),
                     7.902163417175e-08, 3.172737427675e-01, 7.868826573315e-08, 3.638353113815e-08});
    cases.push_back({mk(1.2, {{-0.4, 0.7}, {1.1, 0.5}}, -0.2),
                     1.157116544892e-07, 1.793122684448e-01, 1.153783085868e-07, 5.803452887245e-08});
    for (const auto& fc : cases) {
        InequalityReport rep = inequality_suite(fc.g);
        GATE_CHECK(gate, rep.all_pass);
        for (const auto& item : rep.items) {
            if (item.enabled) GATE_CHECK(gate, item.min_margin > 0.0);
        }
        // the tiny second-order margin sits in a fixed positive band
        const auto& so = find_margin(rep, "second_order_bound");
        GATE_CHECK(gate, so.min_margin > 0.0);
        GATE_CHECK(gate, so.min_margin <= 2e-10);
        GATE_CHECK(gate, std::abs(find_margin(rep, "gradient_ratio").min_margin - fc.gradient) <= 1e-6 * fc.gradient);
        GATE_CHECK(gate, std::abs(find_margin(rep, "log_lipschitz").min_margin - fc.log_lip) <= 1e-6 * fc.log_lip);
        GATE_CHECK(gate,
                   std::abs(find_margin(rep, "curvature_bound").min_margin - fc.curvature) <= 1e-6 * fc.curvature);
        GATE_CHECK(gate, std::abs(find_margin(rep, "tail_domination").min_margin - fc.tail) <= 1e-6 * fc.tail);
    }

    // m4 carries a closed-form variance: pi^2/(12 a^2) + Var(nu)
    InequalityReport m4 = inequality_suite(cases[2].g);
    GATE_CHECK(gate, std::abs(m4.a_hat - pi / 2.4) < 1e-12);
    GATE_CHECK(gate, std::abs(m4.sigma_sq - (pi * pi / 17.28 + 0.546875)) < 1e-10);
}

TEST_CASE("criterion_09_variance_formula") {
    Gate gate(9, "variance_formula");
    GATE_CHECK(gate, std::abs(variance_functional(single_step(1.0)) - pi * pi / 12.0) <= 1e-12);

    // quadrature oracle: integral of x^2 sech^2 x over the line is pi^2/6
    const double lo = -40.0, hi = 40.0;
    const int steps = 160000;
    const double h = (hi - lo) / steps;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double x = lo + i * h;
        const double s = 1.0 / std::cosh(x);
        const double v = x * x * s * s;
        acc += (i == 0 || i == steps) ? 0.5 * v : v;
    }
    acc *= h;
    GATE_CHECK(gate, std::abs(acc - pi * pi / 6.0) <= 1e-10);
}

TEST_CASE("criterion_10_finite_rank_identities") {
    Gate gate(10, "finite_rank_identities");
    GridSpec grid(18.0, 384);
    const double beta = 1.0;

    // rank one: closed-form eigenpair
    {
        const double alpha = pi / 2.0;
        KatoFunction f = single_step(pi / (2.0 * alpha));
        KatoFunction g = single_step(pi / (2.0 * beta));
        KernelMatrix km = nystrom_assemble(f, g, grid);
        IdentityResiduals res = finite_rank_identities(f, g, grid, extract_components(km, 1));
        GATE_CHECK(gate, res.derivative_residual <= 1e-8);
        GATE_CHECK(gate, res.transform_residual <= 1e-8);
    }
    // rank two: numerical eigenbasis
    {
        const double alpha = pi;
        KatoFunction f = single_step(pi / (2.0 * alpha));
        KatoFunction g = single_step(pi / (2.0 * beta));
        KernelMatrix km = nystrom_assemble(f, g, grid);
        IdentityResiduals res = finite_rank_identities(f, g, grid, extract_components(km, 2));
        GATE_CHECK(gate, res.derivative_residual <= 1e-6);
        GATE_CHECK(gate, res.transform_residual <= 1e-6);
    }
}

TEST_CASE("criterion_11_route_equivalence") {
    Gate gate(11, "route_equivalence");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(scenario_dir())) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    GATE_CHECK(gate, files.size() == 5);
    for (const auto& file : files) {
        std::ifstream in(file);
        json j;
        in >> j;
        for (const auto& sc : config_from_json(j)) {
            REQUIRE(sc.f_spec.is_kato());
            REQUIRE(sc.g_spec.is_kato());
            RouteComparison rc = route_equivalence(*sc.f_spec.kato, *sc.g_spec.kato, sc.grid);
            GATE_CHECK(gate, rc.verdicts_agree);
            GATE_CHECK(gate, rc.max_rel_eig_diff <= 1e-4);
        }
    }
}

TEST_CASE("criterion_12_determinism") {
    Gate gate(12, "determinism");
    const std::string dir = scenario_dir();
    for (const char* name : {"rank2_not_positive", "width_mismatch"}) {
        const std::string config = dir + "/" + std::string(name) + ".json";
        const std::string out1 = "/tmp/commlab_accept_det1";
        const std::string out2 = "/tmp/commlab_accept_det2";
        GATE_CHECK(gate, run_cli("run " + config + " --out-dir " + out1 + " --matrices --plotdata") == 0);
        GATE_CHECK(gate, run_cli("run " + config + " --out-dir " + out2 + " --matrices --plotdata") == 0);
        const std::string base = std::string(name);
        const std::string r1 = slurp(out1 + "/" + base + ".report.json");
        const std::string r2 = slurp(out2 + "/" + base + ".report.json");
        GATE_CHECK(gate, !r1.empty());
        GATE_CHECK(gate, strip_timestamp(r1) == strip_timestamp(r2));
        GATE_CHECK(gate, slurp(out1 + "/" + base + ".matrix.csv") == slurp(out2 + "/" + base + ".matrix.csv"));
        GATE_CHECK(gate,
                   slurp(out1 + "/" + base + ".plotdata.csv") == slurp(out2 + "/" + base + ".plotdata.csv"));
    }
}
