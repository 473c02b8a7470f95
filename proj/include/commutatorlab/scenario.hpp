#pragma once

// Scenario model for the command-line driver: a named (f, g, grid, route)
// quadruple plus a list of checks with per-check tolerances. Scenarios
// parse strictly: unknown check names are rejected up front, and route
// constraints (which routes need closed-form transforms, which checks only
// make sense for the kernel discretization) are enforced at parse time so a
// bad config never reaches the numerics.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "commutatorlab/analysis.hpp"
#include "commutatorlab/kernel.hpp"
#include "commutatorlab/opmatrix.hpp"
#include "commutatorlab/serialize.hpp"

namespace commlab {

struct CheckInfo {
    std::string name;
    double default_tolerance;
    std::string description;
};

// Sorted registry of scenario checks; each maps onto one diagnostic
// operation of the library.
inline const std::vector<CheckInfo>& check_registry() {
    static const std::vector<CheckInfo> reg = {
        {"boundary_decay", 1e-12, "relative kernel magnitude on boundary rows/columns (kernel route)"},
        {"diagonal_identity", 1e-10, "kernel diagonal vs K(x,x) = g'(x)[f]/2π, relative (kernel route)"},
        {"hermiticity", 1e-10, "relative Hermiticity defect of the assembled matrix"},
        {"inequality_suite", 1e-6, "derivative inequality battery on g: all margins ≥ -tol"},
        {"numerical_rank", 1e-8, "numerical rank at tolerance x scale equals \"expect\" (integer)"},
        {"positivity_spectrum", 1e-8, "i[f(P), g(Q)] ≥ 0: min eigenvalue ≥ -tol x scale; honors \"expect\": false"},
        {"route_equivalence", 1e-4, "kernel vs operator route: verdicts agree, leading eigenvalues match"},
        {"trace_check", 1e-6, "relative trace error against tr C = [f][g]/2π"},
    };
    return reg;
}

inline const CheckInfo* find_check(const std::string& name) {
    for (const auto& c : check_registry()) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

struct CheckSpec {
    std::string name;
    double tolerance = 0.0;
    bool expect_psd = true;
    int expect_rank = 0;
};

struct FunctionSpec {
    std::optional<KatoFunction> kato;
    std::optional<SampledFunction> sampled;

    bool is_kato() const { return kato.has_value(); }
    double bracket() const { return kato ? total_variation(*kato) : sampled->range_span(); }
};

struct ProbeSpec {
    ProbeFamily family = ProbeFamily::width_mismatch;
    std::vector<double> parameters;
};

struct Scenario {
    std::string name;
    FunctionSpec f_spec;
    FunctionSpec g_spec;
    GridSpec grid;
    std::string route = "kernel";
    std::vector<CheckSpec> checks;
    std::uint64_t seed = 1;
    std::optional<ProbeSpec> probe;
    std::string canonical; // canonical JSON dump, hashed into reports
};

inline FunctionSpec function_spec_from_json(const json& j, const char* which) {
    FunctionSpec fs;
    if (!j.is_object()) throw ParseError(std::string(which) + ": expected an object");
    if (j.contains("sampled_file")) {
        const std::string path = j.at("sampled_file").get<std::string>();
        std::ifstream in(path);
        if (!in) throw std::ios_base::failure(std::string(which) + ": cannot read '" + path + "'");
        json sj;
        try {
            sj = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string(which) + ": '" + path + "': " + e.what());
        }
        fs.sampled = sampled_from_json(sj);
    } else if (j.contains("sampled")) {
        fs.sampled = sampled_from_json(j.at("sampled"));
    } else {
        fs.kato = kato_from_json(j);
    }
    return fs;
}

inline Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("scenario: expected an object");
    Scenario sc;
    if (!j.contains("name") || !j.at("name").is_string()) throw ParseError("scenario: missing string field 'name'");
    sc.name = j.at("name").get<std::string>();
    for (const char* key : {"f_spec", "g_spec", "grid"}) {
        if (!j.contains(key)) throw ParseError("scenario '" + sc.name + "': missing field '" + key + "'");
    }
    sc.f_spec = function_spec_from_json(j.at("f_spec"), "f_spec");
    sc.g_spec = function_spec_from_json(j.at("g_spec"), "g_spec");
    sc.grid = grid_from_json(j.at("grid"));
    if (j.contains("route")) sc.route = j.at("route").get<std::string>();
    if (sc.route != "kernel" && sc.route != "operator" && sc.route != "weyl")
        throw ParseError("scenario '" + sc.name + "': unknown route '" + sc.route + "'");
    if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();

    if (!sc.f_spec.is_kato())
        throw ParseError("scenario '" + sc.name + "': f_spec must be a strip-class function");
    if (sc.route == "weyl" && !sc.g_spec.is_kato())
        throw ParseError("scenario '" + sc.name + "': the weyl route needs a strip-class g_spec");

    if (j.contains("checks")) {
        if (!j.at("checks").is_array()) throw ParseError("scenario '" + sc.name + "': 'checks' must be an array");
        for (const auto& cj : j.at("checks")) {
            if (!cj.is_object() || !cj.contains("name"))
                throw ParseError("scenario '" + sc.name + "': each check needs a 'name'");
            CheckSpec cs;
            cs.name = cj.at("name").get<std::string>();
            const CheckInfo* info = find_check(cs.name);
            if (!info) throw ParseError("scenario '" + sc.name + "': unknown check '" + cs.name + "'");
            cs.tolerance = cj.contains("tolerance") ? cj.at("tolerance").get<double>() : info->default_tolerance;
            if (!(cs.tolerance > 0.0))
                throw ParseError("scenario '" + sc.name + "': check '" + cs.name + "' needs a positive tolerance");
            if (cs.name == "positivity_spectrum" && cj.contains("expect")) cs.expect_psd = cj.at("expect").get<bool>();
            if (cs.name == "numerical_rank") {
                if (!cj.contains("expect"))
                    throw ParseError("scenario '" + sc.name + "': check 'numerical_rank' needs integer 'expect'");
                cs.expect_rank = cj.at("expect").get<int>();
            }
            if ((cs.name == "diagonal_identity" || cs.name == "boundary_decay") && sc.route != "kernel")
                throw ParseError("scenario '" + sc.name + "': check '" + cs.name + "' applies to the kernel route only");
            if ((cs.name == "route_equivalence" || cs.name == "inequality_suite") && !sc.g_spec.is_kato())
                throw ParseError("scenario '" + sc.name + "': check '" + cs.name + "' needs a strip-class g_spec");
            sc.checks.push_back(std::move(cs));
        }
    }

    if (j.contains("probe")) {
        const auto& pj = j.at("probe");
        ProbeSpec ps;
        const std::string fam = pj.at("family").get<std::string>();
        if (fam == "nonmonotone_bump") ps.family = ProbeFamily::nonmonotone_bump;
        else if (fam == "monotone_ramp") ps.family = ProbeFamily::monotone_ramp;
        else if (fam == "width_mismatch") ps.family = ProbeFamily::width_mismatch;
        else throw ParseError("scenario '" + sc.name + "': unknown probe family '" + fam + "'");
        ps.parameters = pj.at("parameters").get<std::vector<double>>();
        if (ps.parameters.empty()) throw ParseError("scenario '" + sc.name + "': probe needs parameters");
        sc.probe = std::move(ps);
    }

    sc.canonical = j.dump();
    return sc;
}

// A config file is either one scenario object or {"scenarios": [...]}.
inline std::vector<Scenario> config_from_json(const json& j) {
    std::vector<Scenario> out;
    if (j.is_object() && j.contains("scenarios")) {
        if (!j.at("scenarios").is_array()) throw ParseError("config: 'scenarios' must be an array");
        for (const auto& sj : j.at("scenarios")) out.push_back(scenario_from_json(sj));
    } else {
        out.push_back(scenario_from_json(j));
    }
    if (out.empty()) throw ParseError("config: no scenarios");
    return out;
}

struct CheckOutcome {
    std::string name;
    double tolerance = 0.0;
    double measured = 0.0;
    bool pass = false;
    std::string detail;
};

struct ScenarioResult {
    std::string name;
    std::string route;
    GridSpec grid;
    bool grid_doubled = false;
    PositivityReport report;
    std::vector<CheckOutcome> checks;
    bool all_pass = true;
    std::string config_hash;
    // full ascending spectrum of the analyzed block, for rank checks and dumps
    std::vector<double> spectrum;
    Eigen::MatrixXcd matrix; // the analyzed matrix (kernel: full; operator: full, report on interior)
    double kernel_boundary_decay = 0.0;
    bool kernel_reduced_accuracy = false;
};

namespace detail {

inline std::vector<double> full_spectrum(const Eigen::MatrixXcd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (M + M.adjoint()), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed");
    std::vector<double> out(static_cast<std::size_t>(solver.eigenvalues().size()));
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return out;
}

} // namespace detail

inline ScenarioResult run_scenario(const Scenario& sc) {
    ScenarioResult res;
    res.name = sc.name;
    res.route = sc.route;
    res.grid = sc.grid;
    res.config_hash = hash_hex(sc.canonical);

    const double expected = sc.f_spec.bracket() * sc.g_spec.bracket() / (2.0 * pi);
    const KatoFunction& f = *sc.f_spec.kato;

    if (sc.route == "kernel") {
        KernelMatrix km = sc.g_spec.is_kato() ? nystrom_assemble(f, *sc.g_spec.kato, sc.grid)
                                              : nystrom_assemble(f, *sc.g_spec.sampled, sc.grid);
        if (km.boundary_warning && sc.g_spec.is_kato()) {
            res.grid = GridSpec(2.0 * sc.grid.L, 2 * sc.grid.N);
            res.grid_doubled = true;
            km = nystrom_assemble(f, *sc.g_spec.kato, res.grid);
        }
        res.kernel_boundary_decay = km.boundary_decay;
        res.kernel_reduced_accuracy = km.reduced_accuracy;
        res.report = positivity_spectrum(km, expected);
        res.spectrum = detail::full_spectrum(km.M);
        res.matrix = std::move(km.M);
    } else {
        OperatorMatrix fP = build_fP(f, sc.grid);
        OperatorMatrix gQ = sc.g_spec.is_kato() ? build_gQ(*sc.g_spec.kato, sc.grid)
                                                : build_gQ(*sc.g_spec.sampled, sc.grid);
        OperatorMatrix C = sc.route == "weyl" ? weyl_representation(f, *sc.g_spec.kato, sc.grid)
                                              : commutator_matrix(fP, gQ);
        res.report = positivity_spectrum(C, expected);
        res.spectrum = detail::full_spectrum(interior_block(band_compress(C).M, sc.grid));
        res.matrix = std::move(C.M);
    }

    const double scale =
        res.spectrum.empty() ? 0.0 : std::max(std::abs(res.spectrum.front()), std::abs(res.spectrum.back()));

    for (const auto& cs : sc.checks) {
        CheckOutcome oc;
        oc.name = cs.name;
        oc.tolerance = cs.tolerance;
        if (cs.name == "hermiticity") {
            oc.measured = res.report.hermiticity_defect;
            oc.pass = oc.measured <= cs.tolerance;
        } else if (cs.name == "positivity_spectrum") {
            oc.measured = res.report.min_eigenvalue;
            const bool verdict = scale == 0.0 || oc.measured >= -cs.tolerance * scale;
            oc.pass = verdict == cs.expect_psd;
            oc.detail = verdict ? "positive semidefinite" : "indefinite";
        } else if (cs.name == "trace_check") {
            const double rel = expected != 0.0 ? std::abs(res.report.trace_computed - expected) / std::abs(expected)
                                               : std::abs(res.report.trace_computed);
            oc.measured = rel;
            oc.pass = rel <= cs.tolerance;
        } else if (cs.name == "inequality_suite") {
            InequalityReport ir = inequality_suite(*sc.g_spec.kato);
            double worst = std::numeric_limits<double>::infinity();
            for (const auto& m : ir.items)
                if (m.enabled) worst = std::min(worst, m.min_margin);
            oc.measured = worst;
            oc.pass = ir.all_pass && worst >= -cs.tolerance;
        } else if (cs.name == "diagonal_identity") {
            const double h = res.grid.h();
            const double bracket_f = sc.f_spec.bracket();
            double worst = 0.0;
            for (int j = 0; j < res.grid.N; ++j) {
                const double gp = sc.g_spec.is_kato()
                                      ? kato_derivative(*sc.g_spec.kato, res.grid.x(j))
                                      : (sc.g_spec.sampled->derivative
                                             ? (*sc.g_spec.sampled->derivative)[static_cast<std::size_t>(j)]
                                             : 0.0);
                const double want = h * gp * bracket_f / (2.0 * pi);
                const double got = res.matrix(j, j).real();
                worst = std::max(worst, std::abs(got - want) / std::max(std::abs(want), 1e-300));
            }
            oc.measured = worst;
            oc.pass = worst <= cs.tolerance;
        } else if (cs.name == "numerical_rank") {
            int rank = 0;
            for (double ev : res.spectrum) {
                if (std::abs(ev) > cs.tolerance * scale) ++rank;
            }
            oc.measured = rank;
            oc.pass = rank == cs.expect_rank;
        } else if (cs.name == "boundary_decay") {
            oc.measured = res.kernel_boundary_decay;
            oc.pass = oc.measured <= cs.tolerance;
        } else if (cs.name == "route_equivalence") {
            RouteComparison rc = route_equivalence(f, *sc.g_spec.kato, res.grid, cs.tolerance);
            oc.measured = rc.max_rel_eig_diff;
            oc.pass = rc.verdicts_agree && rc.max_rel_eig_diff <= cs.tolerance;
            oc.detail = rc.verdicts_agree ? "verdicts agree" : "verdicts differ";
        }
        res.all_pass = res.all_pass && oc.pass;
        res.checks.push_back(std::move(oc));
    }
    return res;
}

inline json result_to_json(const ScenarioResult& res, const std::string& timestamp) {
    json j;
    j["name"] = res.name;
    j["route"] = res.route;
    j["grid"] = grid_to_json(res.grid);
    j["grid_doubled"] = res.grid_doubled;
    j["config_hash"] = res.config_hash;
    j["timestamp"] = timestamp;
    j["report"] = report_to_json(res.report);
    json checks = json::array();
    for (const auto& oc : res.checks) {
        json cj;
        cj["name"] = oc.name;
        cj["tolerance"] = oc.tolerance;
        cj["measured"] = oc.measured;
        cj["pass"] = oc.pass;
        if (!oc.detail.empty()) cj["detail"] = oc.detail;
        checks.push_back(cj);
    }
    j["checks"] = checks;
    j["all_pass"] = res.all_pass;
    return j;
}

} // namespace commlab
