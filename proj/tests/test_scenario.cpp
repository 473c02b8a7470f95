// Tests for the scenario layer: the check registry, JSON parsing with its
// validation rules, scenario execution, and report serialization.

#include "catch2/catch_amalgamated.hpp"
#include "commutatorlab/scenario.hpp"

#include <cstdio>
#include <fstream>

using namespace commlab;

namespace {

json minimal_scenario(const std::string& name) {
    return json{{"name", name},
                {"f_spec", {{"a", 1.2533141373155003}, {"c", 0.0}, {"atoms", {{0.0, 1.0}}}}},
                {"g_spec", {{"a", 1.2533141373155003}, {"c", 0.0}, {"atoms", {{0.0, 1.0}}}}},
                {"grid", {{"L", 20.0}, {"N", 256}}}};
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& p, const std::string& content) : path(p) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("check_registry_sorted_and_complete") {
    const auto& reg = check_registry();
    REQUIRE(reg.size() == 8);
    for (std::size_t i = 1; i < reg.size(); ++i) CHECK(reg[i - 1].name < reg[i].name);
    for (const auto& info : reg) {
        CHECK(info.default_tolerance > 0.0);
        CHECK(!info.description.empty());
    }
    CHECK(find_check("trace_check") != nullptr);
    CHECK(find_check("trace_check")->default_tolerance == 1e-6);
    CHECK(find_check("no_such_check") == nullptr);
}

TEST_CASE("scenario_parse_accepts_minimal_config") {
    json j = minimal_scenario("tiny");
    Scenario sc = scenario_from_json(j);
    CHECK(sc.name == "tiny");
    CHECK(sc.route == "kernel");
    CHECK(sc.grid.N == 256);
    CHECK(sc.checks.empty());
    CHECK(!sc.canonical.empty());

    // a config file may hold one scenario or a list
    auto single = config_from_json(j);
    CHECK(single.size() == 1);
    json multi = {{"scenarios", json::array({minimal_scenario("a"), minimal_scenario("b")})}};
    auto both = config_from_json(multi);
    REQUIRE(both.size() == 2);
    CHECK(both[1].name == "b");
    json empty = {{"scenarios", json::array()}};
    CHECK_THROWS_AS(config_from_json(empty), ParseError);
}

TEST_CASE("scenario_parse_error_paths") {
    // missing required fields
    json noname = minimal_scenario("x");
    noname.erase("name");
    CHECK_THROWS_AS(scenario_from_json(noname), ParseError);
    json nogrid = minimal_scenario("x");
    nogrid.erase("grid");
    CHECK_THROWS_AS(scenario_from_json(nogrid), ParseError);

    // unknown names are rejected, not ignored
    json badcheck = minimal_scenario("x");
    badcheck["checks"] = json::array({{{"name", "eigenvalue_check"}}});
    CHECK_THROWS_AS(scenario_from_json(badcheck), ParseError);
    json badroute = minimal_scenario("x");
    badroute["route"] = "quadrature";
    CHECK_THROWS_AS(scenario_from_json(badroute), ParseError);

    // tolerances must be positive
    json badtol = minimal_scenario("x");
    badtol["checks"] = json::array({{{"name", "trace_check"}, {"tolerance", 0.0}}});
    CHECK_THROWS_AS(scenario_from_json(badtol), ParseError);

    // numerical_rank requires its expected value
    json norank = minimal_scenario("x");
    norank["checks"] = json::array({{{"name", "numerical_rank"}}});
    CHECK_THROWS_AS(scenario_from_json(norank), ParseError);

    // kernel-route-only checks cannot ride the operator route
    json opdiag = minimal_scenario("x");
    opdiag["route"] = "operator";
    opdiag["checks"] = json::array({{{"name", "diagonal_identity"}}});
    CHECK_THROWS_AS(scenario_from_json(opdiag), ParseError);

    // probe family whitelist and non-empty parameters
    json badfam = minimal_scenario("x");
    badfam["probe"] = {{"family", "resonance"}, {"parameters", {0.1}}};
    CHECK_THROWS_AS(scenario_from_json(badfam), ParseError);
    json nopar = minimal_scenario("x");
    nopar["probe"] = {{"family", "width_mismatch"}, {"parameters", json::array()}};
    CHECK_THROWS_AS(scenario_from_json(nopar), ParseError);

    // f must be strip class; sampled f is rejected
    json sampf = minimal_scenario("x");
    sampf["f_spec"] = {{"sampled", {{"x0", -1.0}, {"dx", 1.0}, {"values", {0.0, 1.0, 2.0}}, {"limits", {0.0, 2.0}}}}};
    CHECK_THROWS_AS(scenario_from_json(sampf), ParseError);

    // the weyl route needs a strip-class g
    json weylsamp = minimal_scenario("x");
    weylsamp["route"] = "weyl";
    weylsamp["g_spec"] = {{"sampled", {{"x0", -1.0}, {"dx", 1.0}, {"values", {0.0, 1.0, 2.0}}, {"limits", {0.0, 2.0}}}}};
    CHECK_THROWS_AS(scenario_from_json(weylsamp), ParseError);
}

TEST_CASE("run_scenario_kernel_route_checks") {
    json j = minimal_scenario("selfdual");
    j["grid"] = {{"L", 24.0}, {"N", 256}};
    j["checks"] = json::array({{{"name", "hermiticity"}},
                               {{"name", "positivity_spectrum"}},
                               {{"name", "trace_check"}},
                               {{"name", "diagonal_identity"}},
                               {{"name", "boundary_decay"}},
                               {{"name", "numerical_rank"}, {"expect", 1}}});
    Scenario sc = scenario_from_json(j);
    ScenarioResult res = run_scenario(sc);
    CHECK(res.all_pass);
    CHECK(!res.grid_doubled);
    REQUIRE(res.checks.size() == 6);
    for (const auto& oc : res.checks) CHECK(oc.pass);
    CHECK(res.config_hash.size() == 16);
    CHECK(res.matrix.rows() == 256);
    REQUIRE(res.spectrum.size() == 256);
    for (std::size_t i = 1; i < res.spectrum.size(); ++i) CHECK(res.spectrum[i - 1] <= res.spectrum[i]);
    // the self-dual pair is rank one with top eigenvalue 2/pi
    CHECK(std::abs(res.spectrum.back() - 2.0 / pi) < 1e-8);
}

TEST_CASE("run_scenario_doubles_undersized_boxes") {
    json j = minimal_scenario("cramped");
    j["f_spec"] = {{"a", 1.0}, {"c", 0.0}, {"atoms", {{0.0, 1.0}}}};
    j["g_spec"] = {{"a", 1.5707963267948966}, {"c", 0.0}, {"atoms", {{0.0, 1.0}}}};
    j["grid"] = {{"L", 8.0}, {"N", 128}};
    ScenarioResult res = run_scenario(scenario_from_json(j));
    CHECK(res.grid_doubled);
    CHECK(res.grid.L == 16.0);
    CHECK(res.grid.N == 256);
    // one doubling shrinks the boundary tail by orders of magnitude
    CHECK(res.kernel_boundary_decay < 1e-4);
}

TEST_CASE("run_scenario_expect_false_positivity") {
    // the rank-two pair is genuinely indefinite; expecting that passes
    json j = minimal_scenario("ranktwo");
    j["f_spec"] = {{"a", 0.886226925452758}, {"c", 0.0}, {"atoms", {{0.0, 1.0}}}};
    j["g_spec"] = {{"a", 0.886226925452758}, {"c", 0.0}, {"atoms", {{0.0, 1.0}}}};
    j["grid"] = {{"L", 18.0}, {"N", 256}};
    j["checks"] = json::array({{{"name", "positivity_spectrum"}, {"expect", false}},
                               {{"name", "numerical_rank"}, {"expect", 2}}});
    ScenarioResult res = run_scenario(scenario_from_json(j));
    CHECK(res.all_pass);
    CHECK(res.checks[0].detail == "indefinite");

    // with the default expectation the same scenario fails
    json strict = j;
    strict["checks"] = json::array({{{"name", "positivity_spectrum"}}});
    ScenarioResult bad = run_scenario(scenario_from_json(strict));
    CHECK(!bad.all_pass);
}

TEST_CASE("run_scenario_operator_route") {
    json j = minimal_scenario("op");
    j["route"] = "operator";
    j["grid"] = {{"L", 20.0}, {"N", 384}};
    j["checks"] = json::array({{{"name", "hermiticity"}},
                               {{"name", "positivity_spectrum"}},
                               {{"name", "route_equivalence"}}});
    ScenarioResult res = run_scenario(scenario_from_json(j));
    CHECK(res.all_pass);
    CHECK(res.report.route == "operator");
    CHECK(res.report.boundary_leak > 0.0);
    // spectrum of the interior block, not the full box
    CHECK(res.spectrum.size() < 384u);
    CHECK(res.matrix.rows() == 384);
}

TEST_CASE("sampled_file_reference_loads_g") {
    // sample the strip-class g to a side file and reference it
    KatoFunction g = single_step(1.2533141373155003);
    GridSpec grid(20.0, 256);
    SampledFunction gs = sample(g, -grid.L, grid.h(), grid.N);
    TempFile side("/tmp/commlab_test_sampled.json", sampled_to_json(gs).dump());

    json j = minimal_scenario("fromfile");
    j["g_spec"] = {{"sampled_file", side.path}};
    j["checks"] = json::array({{{"name", "positivity_spectrum"}}, {{"name", "trace_check"}}});
    ScenarioResult res = run_scenario(scenario_from_json(j));
    CHECK(res.all_pass);
    CHECK(!res.kernel_reduced_accuracy); // the file carries the derivative

    json missing = minimal_scenario("nofile");
    missing["g_spec"] = {{"sampled_file", "/tmp/commlab_does_not_exist.json"}};
    CHECK_THROWS_AS(scenario_from_json(missing), std::ios_base::failure);

    TempFile corrupt("/tmp/commlab_test_corrupt.json", "{not json");
    json badfile = minimal_scenario("corrupt");
    badfile["g_spec"] = {{"sampled_file", corrupt.path}};
    CHECK_THROWS_AS(scenario_from_json(badfile), ParseError);
}

TEST_CASE("result_to_json_layout_and_determinism") {
    json j = minimal_scenario("stable");
    j["checks"] = json::array({{{"name", "trace_check"}}, {{"name", "positivity_spectrum"}}});
    Scenario sc = scenario_from_json(j);

    ScenarioResult r1 = run_scenario(sc);
    ScenarioResult r2 = run_scenario(sc);
    const std::string t = "1970-01-01T00:00:00Z";
    const json j1 = result_to_json(r1, t);
    const json j2 = result_to_json(r2, t);
    CHECK(j1.dump(2) == j2.dump(2));

    for (const char* key : {"name", "route", "grid", "grid_doubled", "config_hash", "timestamp", "report",
                            "checks", "all_pass"}) {
        CHECK(j1.contains(key));
    }
    CHECK(j1["name"] == "stable");
    CHECK(j1["timestamp"] == t);
    CHECK(j1["all_pass"] == true);
    CHECK(j1["report"].contains("psd_verdict"));
    CHECK(j1["report"].contains("min_eigenvalue"));
    REQUIRE(j1["checks"].size() == 2);
    CHECK(j1["checks"][0]["name"] == "trace_check");
    CHECK(j1["checks"][0]["pass"] == true);

    // the hash tracks the canonical text: a name change moves it
    json renamed = minimal_scenario("stable2");
    renamed["checks"] = j["checks"];
    CHECK(run_scenario(scenario_from_json(renamed)).config_hash != r1.config_hash);
}
