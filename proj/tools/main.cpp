// Command-line driver for the commutator laboratory.
//
//   commutatorlab run <config.json> [--out-dir DIR] [--matrices] [--plotdata]
//   commutatorlab list-checks
//   commutatorlab kernel-dump <scenario> [--config FILE] [--format csv|bin] [--out FILE]
//   commutatorlab spectrum <scenario> [--config FILE] [--out FILE]
//   commutatorlab probe <scenario> [--config FILE] [--out FILE]
//
// run writes one <name>.report.json per scenario (plus <name>.matrix.csv and
// <name>.plotdata.csv when requested). The other scenario subcommands look the
// name up in --config when given, otherwise in every *.json under the scenario
// directory ($COMMUTATORLAB_SCENARIO_DIR, default ./scenarios).
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 config or usage error,
// 3 input/output error. Reports are deterministic except for the timestamp
// field; set COMMUTATORLAB_THREADS to cap the worker count (results do not
// depend on it).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "commutatorlab/scenario.hpp"

namespace {

using commlab::json;

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw commlab::ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open output file: " + path);
    out << text;
    if (!out) throw std::ios_base::failure("failed writing output file: " + path);
}

std::string scenario_dir() {
    if (const char* env = std::getenv("COMMUTATORLAB_SCENARIO_DIR")) return env;
    return "scenarios";
}

// Find a scenario by name, either in an explicit config or across the
// shipped scenario directory.
commlab::Scenario pick_scenario(const std::string& name, const std::string& config_path) {
    if (!config_path.empty()) {
        for (auto& sc : commlab::config_from_json(load_config(config_path))) {
            if (sc.name == name) return sc;
        }
        throw commlab::ParseError("no scenario named '" + name + "' in " + config_path);
    }
    const std::string dir = scenario_dir();
    std::error_code ec;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    if (ec) throw std::ios_base::failure("cannot read scenario directory: " + dir);
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        for (auto& sc : commlab::config_from_json(load_config(file.string()))) {
            if (sc.name == name) return sc;
        }
    }
    throw commlab::ParseError("no scenario named '" + name + "' under " + dir);
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool matrices, bool plotdata) {
    auto scenarios = commlab::config_from_json(load_config(config_path));
    bool all_pass = true;
    const std::string stamp = utc_timestamp();
    std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    for (const auto& sc : scenarios) {
        commlab::ScenarioResult res = commlab::run_scenario(sc);
        all_pass = all_pass && res.all_pass;
        write_text((dir / (res.name + ".report.json")).string(),
                   commlab::result_to_json(res, stamp).dump(2) + "\n");
        if (matrices) {
            std::ostringstream os;
            commlab::write_matrix_csv(os, res.matrix);
            write_text((dir / (res.name + ".matrix.csv")).string(), os.str());
        }
        if (plotdata) {
            std::ostringstream os;
            commlab::write_real_vector_csv(os, res.spectrum);
            write_text((dir / (res.name + ".plotdata.csv")).string(), os.str());
        }
        std::cerr << "[scenario] " << res.name << ": " << (res.all_pass ? "pass" : "FAIL") << "\n";
    }
    return all_pass ? 0 : 1;
}

int cmd_kernel_dump(const std::string& name, const std::string& config_path, const std::string& format,
                    const std::string& out_path) {
    commlab::ScenarioResult res = commlab::run_scenario(pick_scenario(name, config_path));
    if (format == "bin") {
        if (out_path.empty()) throw commlab::ParseError("kernel-dump --format bin needs --out");
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::ios_base::failure("cannot open output file: " + out_path);
        commlab::write_matrix_binary(out, res.matrix);
        if (!out) throw std::ios_base::failure("failed writing output file: " + out_path);
    } else {
        std::ostringstream os;
        commlab::write_matrix_csv(os, res.matrix);
        write_text(out_path, os.str());
    }
    return 0;
}

int cmd_spectrum(const std::string& name, const std::string& config_path, const std::string& out_path) {
    commlab::ScenarioResult res = commlab::run_scenario(pick_scenario(name, config_path));
    json j;
    j["name"] = res.name;
    j["route"] = res.route;
    j["config_hash"] = res.config_hash;
    json eigs = json::array();
    for (double ev : res.spectrum) eigs.push_back(ev);
    j["eigenvalues"] = eigs;
    j["min_eigenvalue"] = res.report.min_eigenvalue;
    j["psd_verdict"] = res.report.psd_verdict;
    write_text(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_probe(const std::string& name, const std::string& config_path, const std::string& out_path) {
    commlab::Scenario sc = pick_scenario(name, config_path);
    if (!sc.probe) throw commlab::ParseError("scenario '" + name + "' has no probe section");
    auto rows = commlab::conjecture_probe(sc.probe->family, sc.probe->parameters, sc.grid);
    std::ostringstream os;
    commlab::write_probe_catalog_csv(os, rows);
    write_text(out_path, os.str());
    return 0;
}

int cmd_list_checks() {
    for (const auto& info : commlab::check_registry()) {
        std::printf("%-20s default tolerance %.1e  %s\n", info.name.c_str(), info.default_tolerance,
                    info.description.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for commutators i[f(P), g(Q)]"};
    app.require_subcommand(1);

    std::string config_path, scenario_name, out_path, out_dir, format = "csv";
    bool matrices = false, plotdata = false;

    auto* run = app.add_subcommand("run", "run every scenario in a config and write per-scenario reports");
    run->add_option("config", config_path, "config JSON file")->required();
    run->add_option("--out-dir", out_dir, "directory for <name>.report.json files (default .)");
    run->add_flag("--matrices", matrices, "also write <name>.matrix.csv");
    run->add_flag("--plotdata", plotdata, "also write <name>.plotdata.csv (spectrum)");

    auto* list = app.add_subcommand("list-checks", "list available check names and default tolerances");

    auto* dump = app.add_subcommand("kernel-dump", "write the assembled matrix of one scenario");
    dump->add_option("scenario", scenario_name, "scenario name")->required();
    dump->add_option("--config", config_path, "config JSON file (default: scenario directory)");
    dump->add_option("--format", format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}));
    dump->add_option("--out", out_path, "output file (default stdout for csv)");

    auto* spec = app.add_subcommand("spectrum", "write the analyzed spectrum of one scenario");
    spec->add_option("scenario", scenario_name, "scenario name")->required();
    spec->add_option("--config", config_path, "config JSON file (default: scenario directory)");
    spec->add_option("--out", out_path, "output file (default stdout)");

    auto* probe = app.add_subcommand("probe", "evaluate a probe family sweep and write a CSV catalog");
    probe->add_option("scenario", scenario_name, "scenario name")->required();
    probe->add_option("--config", config_path, "config JSON file (default: scenario directory)");
    probe->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, matrices, plotdata);
        if (list->parsed()) return cmd_list_checks();
        if (dump->parsed()) return cmd_kernel_dump(scenario_name, config_path, format, out_path);
        if (spec->parsed()) return cmd_spectrum(scenario_name, config_path, out_path);
        if (probe->parsed()) return cmd_probe(scenario_name, config_path, out_path);
    } catch (const commlab::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
