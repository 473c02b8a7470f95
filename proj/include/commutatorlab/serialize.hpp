#pragma once

// JSON codecs for the value types, CSV and raw binary matrix dumps, and the
// small deterministic config hash stamped into reports.
//
// Binary matrix format: a single little-endian int64 holding N, followed by
// the N x N complex entries in column-major order, each entry as two
// float64 values (real part, then imaginary part).

#include <Eigen/Dense>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "commutatorlab/analysis.hpp"
#include "commutatorlab/fourier.hpp"
#include "commutatorlab/funcspace.hpp"

namespace commlab {

using json = nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest-exact decimal rendering for CSV output.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(const std::string& data) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(data)));
    return buf;
}

// ---- strip-class functions -------------------------------------------------

inline json kato_to_json(const KatoFunction& f) {
    json j;
    j["a"] = f.a;
    j["c"] = f.c;
    json atoms = json::array();
    for (const auto& [t, w] : f.measure.atoms) atoms.push_back(json::array({t, w}));
    j["atoms"] = atoms;
    if (f.measure.density) {
        const auto& d = *f.measure.density;
        j["density"] = {{"x0", d.x0}, {"dx", d.dx}, {"values", d.values}};
    } else {
        j["density"] = nullptr;
    }
    return j;
}

inline KatoFunction kato_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("function spec: expected an object");
    for (const char* key : {"a", "c", "atoms"}) {
        if (!j.contains(key)) throw ParseError(std::string("function spec: missing field '") + key + "'");
    }
    AtomicMeasure m;
    for (const auto& pair : j.at("atoms")) {
        if (!pair.is_array() || pair.size() != 2) throw ParseError("function spec: atoms must be [t, w] pairs");
        m.atoms.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
    }
    if (j.contains("density") && !j.at("density").is_null()) {
        const auto& dj = j.at("density");
        AtomicMeasure::Density d;
        d.x0 = dj.at("x0").get<double>();
        d.dx = dj.at("dx").get<double>();
        d.values = dj.at("values").get<std::vector<double>>();
        m.density = std::move(d);
    }
    try {
        return KatoFunction(j.at("a").get<double>(), j.at("c").get<double>(), std::move(m));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("function spec: ") + e.what());
    }
}

inline json sampled_to_json(const SampledFunction& s) {
    json j;
    j["x0"] = s.x0;
    j["dx"] = s.dx;
    j["values"] = s.values;
    if (s.derivative) j["derivative"] = *s.derivative;
    j["limits"] = json::array({s.limit_left, s.limit_right});
    return j;
}

inline SampledFunction sampled_from_json(const json& j) {
    SampledFunction s;
    try {
        s.x0 = j.at("x0").get<double>();
        s.dx = j.at("dx").get<double>();
        s.values = j.at("values").get<std::vector<double>>();
        if (j.contains("derivative") && !j.at("derivative").is_null())
            s.derivative = j.at("derivative").get<std::vector<double>>();
        const auto& lim = j.at("limits");
        s.limit_left = lim.at(0).get<double>();
        s.limit_right = lim.at(1).get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("sampled spec: ") + e.what());
    }
    s.monotone = true;
    if (s.derivative) {
        for (double d : *s.derivative) {
            if (d < 0.0) s.monotone = false;
        }
    }
    s.refresh_sup();
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("sampled spec: ") + e.what());
    }
    return s;
}

inline json grid_to_json(const GridSpec& g) { return json{{"L", g.L}, {"N", g.N}}; }

inline GridSpec grid_from_json(const json& j) {
    try {
        GridSpec g(j.at("L").get<double>(), j.at("N").get<int>());
        return g;
    } catch (const json::exception& e) {
        throw ParseError(std::string("grid spec: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("grid spec: ") + e.what());
    }
}

// ---- reports ----------------------------------------------------------------

inline json report_to_json(const PositivityReport& r) {
    json j;
    j["min_eigenvalue"] = r.min_eigenvalue;
    j["top_eigenvalues"] = r.top_eigenvalues;
    j["trace_computed"] = r.trace_computed;
    j["trace_expected"] = r.trace_expected;
    j["numerical_rank"] = r.numerical_rank;
    j["rank_tolerance"] = r.rank_tolerance;
    j["psd_tolerance"] = r.psd_tolerance;
    j["psd_verdict"] = r.psd_verdict;
    j["route"] = r.route;
    j["boundary_leak"] = r.boundary_leak;
    j["hermiticity_defect"] = r.hermiticity_defect;
    return j;
}

inline json inequality_to_json(const InequalityReport& r) {
    json items = json::array();
    for (const auto& m : r.items) {
        json it;
        it["name"] = m.name;
        it["enabled"] = m.enabled;
        it["min_margin"] = m.enabled ? m.min_margin : 0.0;
        it["error_estimate"] = m.enabled ? m.error_estimate : 0.0;
        it["at_x"] = m.enabled ? m.at_x : 0.0;
        it["pass"] = m.pass;
        items.push_back(it);
    }
    json j;
    j["items"] = items;
    j["all_pass"] = r.all_pass;
    j["sharpness_margin"] = r.sharpness_margin;
    j["symmetric_center"] = r.symmetric_center;
    j["a_hat"] = r.a_hat;
    j["sigma_sq"] = r.sigma_sq;
    return j;
}

inline json periodic_to_json(const PeriodicCommuteReport& r) {
    json j;
    j["residual"] = r.residual;
    j["scale"] = r.scale;
    j["relative"] = r.relative;
    j["L"] = r.L;
    j["N"] = r.N;
    j["p"] = r.p;
    j["tau_f"] = r.tau_f;
    j["tau_g"] = r.tau_g;
    j["mismatch"] = r.mismatch;
    return j;
}

// ---- CSV and binary dumps -----------------------------------------------------

inline void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& M) {
    os << "i,j,re,im\n";
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            os << i << ',' << j << ',' << format_double(M(i, j).real()) << ','
               << format_double(M(i, j).imag()) << '\n';
        }
    }
}

inline void write_vector_csv(std::ostream& os, const std::vector<complexd>& v) {
    os << "index,re,im\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
        os << i << ',' << format_double(v[i].real()) << ',' << format_double(v[i].imag()) << '\n';
    }
}

inline void write_real_vector_csv(std::ostream& os, const std::vector<double>& v) {
    os << "index,value\n";
    for (std::size_t i = 0; i < v.size(); ++i) os << i << ',' << format_double(v[i]) << '\n';
}

inline void write_matrix_binary(std::ostream& os, const Eigen::MatrixXcd& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("write_matrix_binary: need a square matrix");
    const std::int64_t n = static_cast<std::int64_t>(M.rows());
    os.write(reinterpret_cast<const char*>(&n), sizeof(n));
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            const double re = M(i, j).real(), im = M(i, j).imag();
            os.write(reinterpret_cast<const char*>(&re), sizeof(re));
            os.write(reinterpret_cast<const char*>(&im), sizeof(im));
        }
    }
}

inline void write_probe_catalog_csv(std::ostream& os, const std::vector<ProbeRow>& rows) {
    os << "family,parameter,min_eigenvalue,max_eigenvalue,monotone,verdict\n";
    for (const auto& r : rows) {
        os << r.family << ',' << format_double(r.parameter) << ',' << format_double(r.min_eigenvalue) << ','
           << format_double(r.max_eigenvalue) << ',' << (r.monotone ? "true" : "false") << ',' << r.verdict
           << '\n';
    }
}

} // namespace commlab
