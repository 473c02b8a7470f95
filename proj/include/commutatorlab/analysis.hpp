#pragma once

// Verdict layer: spectral positivity reports, trace identities, the exact
// periodic commutation check, pointwise inequalities of the derivative
// profile, order-preserving reparametrizations, and parameter sweeps that
// probe the boundary of the positivity region.
//
// Trace identity: the weighted kernel matrix of i [f(P), g(Q)] has diagonal
// h g'(x_j) [f] / (2 pi), so its trace converges to [f][g] / (2 pi), with
// [f] = f(inf) - f(-inf).
//
// Periodic pairing: when tau_f tau_g = 2 pi and the box is commensurate
// (tau_f = p Delta xi with p | N), every harmonic of g shifts the momentum
// grid by whole bins and every harmonic of f translates the position grid
// by whole steps, so f(P) and g(Q) commute exactly in exact arithmetic; the
// discrete residual is pure rounding. Breaking the pairing by a relative
// mismatch epsilon destroys this at O(epsilon).

#include <Eigen/Dense>

#include <limits>
#include <random>
#include <string>
#include <vector>

#include "commutatorlab/common.hpp"
#include "commutatorlab/fourier.hpp"
#include "commutatorlab/funcspace.hpp"
#include "commutatorlab/kernel.hpp"
#include "commutatorlab/opmatrix.hpp"

namespace commlab {

struct PositivityReport {
    double min_eigenvalue = 0.0;
    std::vector<double> top_eigenvalues; // descending, at most 16
    double trace_computed = 0.0;
    double trace_expected = 0.0;
    int numerical_rank = 0;
    double rank_tolerance = 1e-8;
    double psd_tolerance = 1e-8;
    bool psd_verdict = false;
    std::string route;
    double boundary_leak = 0.0;        // operator routes only
    double hermiticity_defect = 0.0;   // relative, pre-symmetrization
};

struct SpectrumOptions {
    std::string route = "kernel";
    double trace_expected = 0.0;
    double rank_tolerance = 1e-8;
    double psd_tolerance = 1e-8;
    double boundary_leak = 0.0;
    int top_count = 16;
};

// Eigen-spectrum report of a Hermitian matrix. Rejects matrices whose
// Hermiticity defect exceeds 1e-10 relative, then symmetrizes before the
// solve so the report is well-defined.
inline PositivityReport positivity_spectrum(const Eigen::MatrixXcd& M, SpectrumOptions opt = {}) {
    const Eigen::Index n = M.rows();
    if (n == 0 || M.cols() != n) throw std::invalid_argument("positivity_spectrum: need a square matrix");
    double max_abs = 0.0, defect = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            max_abs = std::max(max_abs, std::abs(M(j, k)));
            defect = std::max(defect, std::abs(M(j, k) - std::conj(M(k, j))));
        }
    }
    const double rel_defect = max_abs > 0.0 ? defect / max_abs : 0.0;
    if (rel_defect > 1e-10)
        throw std::invalid_argument("positivity_spectrum: matrix is not Hermitian within tolerance");

    const Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("positivity_spectrum: eigensolver failed");
    const auto& ev = solver.eigenvalues(); // ascending

    PositivityReport rep;
    rep.route = opt.route;
    rep.trace_expected = opt.trace_expected;
    rep.rank_tolerance = opt.rank_tolerance;
    rep.psd_tolerance = opt.psd_tolerance;
    rep.boundary_leak = opt.boundary_leak;
    rep.hermiticity_defect = rel_defect;
    rep.min_eigenvalue = ev(0);
    rep.trace_computed = H.trace().real();
    const double scale = std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
    rep.numerical_rank = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(ev(i)) > opt.rank_tolerance * scale) ++rep.numerical_rank;
    }
    const int top = std::min<int>(opt.top_count, static_cast<int>(n));
    for (int i = 0; i < top; ++i) rep.top_eigenvalues.push_back(ev(n - 1 - i));
    rep.psd_verdict = scale == 0.0 || rep.min_eigenvalue >= -opt.psd_tolerance * scale;
    return rep;
}

inline PositivityReport positivity_spectrum(const KernelMatrix& km, double trace_expected,
                                            SpectrumOptions opt = {}) {
    opt.route = "kernel";
    opt.trace_expected = trace_expected;
    return positivity_spectrum(km.M, opt);
}

// Operator-route report: band-compress away zone-edge (Nyquist) content,
// then take the spectrum of the interior principal submatrix, with the
// out-of-interior contamination of the raw matrix recorded as boundary leak.
inline PositivityReport positivity_spectrum(const OperatorMatrix& om, double trace_expected,
                                            SpectrumOptions opt = {}) {
    if (opt.route == "kernel") opt.route = "operator";
    opt.trace_expected = trace_expected;
    opt.boundary_leak = boundary_leak(om.M, om.grid);
    return positivity_spectrum(interior_block(band_compress(om).M, om.grid), opt);
}

struct TraceCheck {
    double computed = 0.0;
    double expected = 0.0;
    double rel_error = 0.0;
    bool pass = false;
};

inline TraceCheck trace_check(const KatoFunction& f, const KatoFunction& g, double trace_computed,
                              double rel_tol = 1e-6) {
    TraceCheck tc;
    tc.computed = trace_computed;
    tc.expected = total_variation(f) * total_variation(g) / (2.0 * pi);
    // A constant factor makes the expected trace 0; fall back to the
    // absolute error so the zero-commutator case stays well-defined.
    tc.rel_error = tc.expected != 0.0 ? std::abs(tc.computed - tc.expected) / std::abs(tc.expected)
                                      : std::abs(tc.computed);
    tc.pass = tc.rel_error <= rel_tol;
    return tc;
}

// Random real trigonometric polynomial with unit-scale coefficients drawn
// deterministically from the seed.
struct TrigPolynomial {
    double period = 2.0 * pi;
    std::vector<double> cos_coeff;
    std::vector<double> sin_coeff;

    double operator()(double x) const {
        double acc = 0.0;
        for (std::size_t m = 0; m < cos_coeff.size(); ++m) {
            const double w = 2.0 * pi * static_cast<double>(m + 1) / period;
            acc += cos_coeff[m] * std::cos(w * x) + sin_coeff[m] * std::sin(w * x);
        }
        return acc;
    }
};

inline TrigPolynomial random_trig_polynomial(double period, int harmonics, std::mt19937_64& gen) {
    TrigPolynomial poly;
    poly.period = period;
    poly.cos_coeff.resize(static_cast<std::size_t>(harmonics));
    poly.sin_coeff.resize(static_cast<std::size_t>(harmonics));
    for (int m = 0; m < harmonics; ++m) {
        poly.cos_coeff[static_cast<std::size_t>(m)] = uniform_symmetric(gen);
        poly.sin_coeff[static_cast<std::size_t>(m)] = uniform_symmetric(gen);
    }
    return poly;
}

struct PeriodicSpec {
    double tau_f = pi;        // period of the momentum symbol
    int harmonics = 3;
    std::uint64_t seed = 1;
    double L_hint = 16.0;
    int N_hint = 2048;
    double mismatch = 0.0;    // relative detuning of tau_g away from 2 pi / tau_f
};

struct PeriodicCommuteReport {
    double residual = 0.0;  // Frobenius norm of i (f(P) g(Q) - g(Q) f(P))
    double scale = 0.0;     // max|f| * max|g| over the sample sets
    double relative = 0.0;
    double L = 0.0;
    int N = 0;
    int p = 0;              // tau_f / Delta xi, a power of two dividing N
    double tau_f = 0.0;
    double tau_g = 0.0;
    double mismatch = 0.0;
};

inline PeriodicCommuteReport commute_check_periodic(const PeriodicSpec& spec) {
    if (!(spec.tau_f > 0.0) || spec.harmonics < 1)
        throw std::invalid_argument("commute_check_periodic: bad spec");
    // Commensurate box: L = p pi / tau_f with p a power of two, so that
    // tau_f is exactly p momentum bins and tau_g is exactly N/p grid steps.
    int p = 1;
    {
        const double target = spec.L_hint * spec.tau_f / pi;
        const double l2 = std::log2(std::max(target, 1.0));
        p = 1 << std::clamp(static_cast<int>(std::lround(l2)), 0, 20);
    }
    const double L = p * pi / spec.tau_f;
    int N = 64;
    const long needed = std::max<long>({spec.N_hint, 8L * spec.harmonics * p, 4L * p});
    while (N < needed) N <<= 1;
    if (N > (1 << 14))
        throw std::domain_error("commute_check_periodic: commensurate grid would exceed 2^14 points");

    std::mt19937_64 gen(spec.seed);
    TrigPolynomial f = random_trig_polynomial(spec.tau_f, spec.harmonics, gen);
    const double tau_g = (2.0 * pi / spec.tau_f) * (1.0 + spec.mismatch);
    TrigPolynomial g = random_trig_polynomial(tau_g, spec.harmonics, gen);

    const GridSpec grid(L, N);
    std::vector<double> fsym(static_cast<std::size_t>(N)), gsym(static_cast<std::size_t>(N));
    double fmax = 0.0, gmax = 0.0;
    for (int q = 0; q < N; ++q) {
        fsym[static_cast<std::size_t>(q)] = f(grid.xi_index(q));
        gsym[static_cast<std::size_t>(q)] = g(grid.x(q));
        fmax = std::max(fmax, std::abs(fsym[static_cast<std::size_t>(q)]));
        gmax = std::max(gmax, std::abs(gsym[static_cast<std::size_t>(q)]));
    }

    // First circulant column of f(P), then stream the commutator entries
    // C_{jk} = i c_{(j-k) mod N} (g_k - g_j) without materializing matrices.
    std::vector<complexd> arr(static_cast<std::size_t>(N));
    for (int q = 0; q < N; ++q) {
        const int k = q - N / 2;
        arr[static_cast<std::size_t>((k + N) % N)] = fsym[static_cast<std::size_t>(q)];
    }
    auto c = detail::dft_raw(std::move(arr), +1);
    for (auto& z : c) z /= static_cast<double>(N);

    std::vector<double> row_sums(static_cast<std::size_t>(N), 0.0);
    parallel_for(N, [&](std::ptrdiff_t lo, std::ptrdiff_t hi) {
        for (std::ptrdiff_t j = lo; j < hi; ++j) {
            double acc = 0.0;
            for (int k = 0; k < N; ++k) {
                const double diff = gsym[static_cast<std::size_t>(k)] - gsym[static_cast<std::size_t>(j)];
                acc += std::norm(c[static_cast<std::size_t>(((static_cast<int>(j) - k) % N + N) % N)]) * diff * diff;
            }
            row_sums[static_cast<std::size_t>(j)] = acc;
        }
    });
    double fro2 = 0.0;
    for (double v : row_sums) fro2 += v;

    PeriodicCommuteReport rep;
    rep.residual = std::sqrt(fro2);
    rep.scale = fmax * gmax;
    rep.relative = rep.scale > 0.0 ? rep.residual / rep.scale : 0.0;
    rep.L = L;
    rep.N = N;
    rep.p = p;
    rep.tau_f = spec.tau_f;
    rep.tau_g = tau_g;
    rep.mismatch = spec.mismatch;
    return rep;
}

// Pointwise inequalities of the derivative profile. With psi = (g')^{-1/2}
// and a_hat the slope of the class:
//
//   second_order_bound   a_hat^2 psi - psi'' >= 0       (equality: one atom)
//   gradient_ratio       |psi' / psi| <= a_hat
//   log_lipschitz        |log g'(x) - log g'(x0)| <= 2 a_hat |x - x0|
//   curvature_bound      |g''| <= 2 a_hat g'
//   tail_domination      g'(x) <= 2 a_hat min(g(inf) - g(x), g(x) - g(-inf))
//   reflection_floor     g'(x) cosh^2(a_hat (x - x0)) >= g'(x0)
//                        (only when the measure is symmetric about x0)
//
// Stencil derivatives of psi use the 5-point rule at spacings h and 2h; the
// Richardson difference provides the error estimate, margins are normalized
// by the local scale, and a pass means margin >= -estimate pointwise.
// Halving the rate in the second-order bound must break it; the most
// negative margin of that probe is reported as the sharpness check.
struct InequalityMargin {
    std::string name;
    double min_margin = 0.0;
    double error_estimate = 0.0;
    double at_x = 0.0;
    bool enabled = true;
    bool pass = false;
};

struct InequalityReport {
    std::vector<InequalityMargin> items;
    bool all_pass = false;
    double sharpness_margin = 0.0; // second-order margin with a_hat / 2; negative
    bool symmetric_center = false;
    double a_hat = 0.0;    // slope used throughout the suite
    double sigma_sq = 0.0; // variance functional of the input
};

struct InequalityOptions {
    double window = 0.0;   // scan half-width; 0 picks 8/a_hat + atom spread
    int points = 2001;
    double stencil_h = 0.0; // 0 picks 0.01 / a_hat
};

namespace detail {

template <class Psi>
double stencil_second(const Psi& psi, double x, double h) {
    return (-psi(x - 2.0 * h) + 16.0 * psi(x - h) - 30.0 * psi(x) + 16.0 * psi(x + h) - psi(x + 2.0 * h)) /
           (12.0 * h * h);
}

template <class Psi>
double stencil_first(const Psi& psi, double x, double h) {
    return (psi(x - 2.0 * h) - 8.0 * psi(x - h) + 8.0 * psi(x + h) - psi(x + 2.0 * h)) / (12.0 * h);
}

inline bool measure_symmetric(const AtomicMeasure& m, double center) {
    const double tol = 1e-12;
    std::vector<std::pair<double, double>> rest = m.atoms;
    while (!rest.empty()) {
        const auto [t, w] = rest.back();
        rest.pop_back();
        const double mirror = 2.0 * center - t;
        if (std::abs(t - center) <= tol) continue;
        bool found = false;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            if (std::abs(rest[i].first - mirror) <= tol && std::abs(rest[i].second - w) <= tol * (1.0 + w)) {
                rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    if (m.density) {
        const auto& d = *m.density;
        const std::size_t n = d.values.size();
        const double left = d.x0, right = d.x0 + static_cast<double>(n - 1) * d.dx;
        if (std::abs((left + right) / 2.0 - center) > 1e-9) return false;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(d.values[i] - d.values[n - 1 - i]) > 1e-9 * (1.0 + std::abs(d.values[i]))) return false;
        }
    }
    return true;
}

} // namespace detail

inline InequalityReport inequality_suite(const KatoFunction& g, InequalityOptions opt = {}) {
    const double ahat = g.slope();
    const double center = g.measure.mean();
    double spread = 0.0;
    for (const auto& [t, w] : g.measure.atoms) spread = std::max(spread, std::abs(t - center));
    if (g.measure.density) {
        const auto& d = *g.measure.density;
        spread = std::max({spread, std::abs(d.x0 - center),
                           std::abs(d.x0 + static_cast<double>(d.values.size() - 1) * d.dx - center)});
    }
    const double W = opt.window > 0.0 ? opt.window : 8.0 / ahat + spread;
    const int n = std::max(41, opt.points | 1); // odd, includes the center
    const double hs = opt.stencil_h > 0.0 ? opt.stencil_h : 0.01 / ahat;

    auto psi = [&](double x) { return 1.0 / std::sqrt(kato_derivative(g, x)); };

    InequalityReport rep;
    rep.symmetric_center = detail::measure_symmetric(g.measure, center);
    rep.a_hat = ahat;
    rep.sigma_sq = variance_functional(g);

    InequalityMargin second{"second_order_bound"}, gradient{"gradient_ratio"}, llip{"log_lipschitz"},
        curvature{"curvature_bound"}, tail{"tail_domination"}, reflect{"reflection_floor"};
    reflect.enabled = rep.symmetric_center;
    for (auto* m : {&second, &gradient, &llip, &curvature, &tail, &reflect}) {
        m->min_margin = std::numeric_limits<double>::infinity();
        m->pass = true;
    }
    double sharpness = std::numeric_limits<double>::infinity();

    const double gp_center = kato_derivative(g, center);
    const double log_gp_center = std::log(gp_center);
    const double lim_left = g.limit_left(), lim_right = g.limit_right();

    auto update = [](InequalityMargin& m, double margin, double err, double x) {
        if (margin < m.min_margin) {
            m.min_margin = margin;
            m.error_estimate = err;
            m.at_x = x;
        }
        if (margin < -err) m.pass = false;
    };

    const double step = 2.0 * W / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double x = center - W + i * step;
        const double gp = kato_derivative(g, x);
        const double gpp = kato_second_derivative(g, x);
        const double px = psi(x);

        // second-order bound, stencil + Richardson on psi
        {
            const double d2h = detail::stencil_second(psi, x, hs);
            const double d2H = detail::stencil_second(psi, x, 2.0 * hs);
            const double scale = ahat * ahat * px;
            const double richardson = std::abs(d2h - d2H) / 15.0;
            const double fp_noise = 64.0 * px * 1e-16 / (12.0 * hs * hs);
            const double err = (richardson + fp_noise) / scale;
            update(second, (scale - d2h) / scale, err, x);
            const double half_scale = 0.25 * ahat * ahat * px;
            const double sm = (half_scale - d2h) / half_scale;
            sharpness = std::min(sharpness, sm);
        }
        // gradient ratio, stencil route (independent of the analytic g'')
        {
            const double d1h = detail::stencil_first(psi, x, hs);
            const double d1H = detail::stencil_first(psi, x, 2.0 * hs);
            const double richardson = std::abs(d1h - d1H) / 15.0;
            const double fp_noise = 18.0 * px * 1e-16 / (12.0 * hs);
            const double err = (richardson + fp_noise) / (ahat * px);
            update(gradient, (ahat * px - std::abs(d1h)) / (ahat * px), err, x);
        }
        // log-Lipschitz bound from the center, both sides in one margin
        if (std::abs(x - center) > 0.51 * step) {
            const double lhs = std::abs(std::log(gp) - log_gp_center);
            const double rhs = 2.0 * ahat * std::abs(x - center);
            update(llip, (rhs - lhs) / rhs, 1e-13, x);
        }
        // curvature bound, analytic second derivative
        {
            const double rhs = 2.0 * ahat * gp;
            update(curvature, (rhs - std::abs(gpp)) / rhs, 1e-13, x);
        }
        // tail domination
        {
            const double gx = kato_eval(g, x);
            const double dom = 2.0 * ahat * std::min(lim_right - gx, gx - lim_left);
            update(tail, (dom - gp) / dom, 1e-13, x);
        }
        // reflection floor about the center of symmetry
        if (reflect.enabled) {
            const double ch = std::cosh(ahat * (x - center));
            update(reflect, (gp * ch * ch - gp_center) / gp_center, 1e-10 * ch * ch, x);
        }
    }

    rep.sharpness_margin = sharpness;
    rep.items = {second, gradient, llip, curvature, tail, reflect};
    rep.all_pass = true;
    for (const auto& m : rep.items) {
        if (m.enabled && !m.pass) rep.all_pass = false;
    }
    return rep;
}

// Order-preserving Mobius reparametrization of the momentum symbol:
// F(v) = (p v + q) / (r v + s) with p s - q r > 0 and the pole kept outside
// the closed range of f. The transformed pair keeps the same verdict.
struct MobiusMap {
    double p = 1.0, q = 0.0, r = 0.0, s = 1.0;

    double determinant() const { return p * s - q * r; }
    double operator()(double v) const { return (p * v + q) / (r * v + s); }
};

inline PositivityReport monotone_transform(const KatoFunction& f, const KatoFunction& g, const MobiusMap& map,
                                           const GridSpec& grid) {
    if (!(map.determinant() > 0.0))
        throw std::invalid_argument("monotone_transform: need p s - q r > 0");
    if (map.r != 0.0) {
        const double pole = -map.s / map.r;
        const double lo = f.limit_left(), hi = f.limit_right();
        if (pole >= lo - 1e-9 && pole <= hi + 1e-9)
            throw std::domain_error("monotone_transform: pole of the map meets the range of f");
    }
    grid.validate();
    std::vector<double> symbol(static_cast<std::size_t>(grid.N));
    for (int q = 0; q < grid.N; ++q) symbol[static_cast<std::size_t>(q)] = map(kato_eval(f, grid.xi_index(q)));
    OperatorMatrix Ff = build_fP_symbol(symbol, grid, "mobius momentum operator");
    OperatorMatrix Gq = build_gQ(g, grid);
    OperatorMatrix C = commutator_matrix(Ff, Gq);
    SpectrumOptions opt;
    opt.route = "operator mobius";
    return positivity_spectrum(C, 0.0, opt);
}

// Cross-route check: kernel discretization vs operator commutator on the
// same interior window; verdicts must agree and the leading eigenvalues
// must match to the stated tolerance.
struct RouteComparison {
    PositivityReport kernel_report;
    PositivityReport operator_report;
    bool verdicts_agree = false;
    double max_rel_eig_diff = 0.0;
    double eig_tolerance = 1e-4;
};

inline RouteComparison route_equivalence(const KatoFunction& f, const KatoFunction& g, const GridSpec& grid,
                                         double eig_tol = 1e-4) {
    const double expected = total_variation(f) * total_variation(g) / (2.0 * pi);
    KernelMatrix km = nystrom_assemble(f, g, grid);
    SpectrumOptions kopt;
    kopt.route = "kernel interior";
    kopt.trace_expected = expected;
    PositivityReport kr = positivity_spectrum(interior_block(km.M, grid), kopt);

    OperatorMatrix C = commutator_matrix(build_fP(f, grid), build_gQ(g, grid));
    PositivityReport orp = positivity_spectrum(C, expected);

    RouteComparison rc;
    rc.kernel_report = kr;
    rc.operator_report = orp;
    rc.eig_tolerance = eig_tol;
    rc.verdicts_agree = kr.psd_verdict == orp.psd_verdict;
    const double scale = std::max(std::abs(kr.top_eigenvalues.front()), std::abs(orp.top_eigenvalues.front()));
    double worst = 0.0;
    const std::size_t m = std::min(kr.top_eigenvalues.size(), orp.top_eigenvalues.size());
    for (std::size_t i = 0; i < m; ++i) {
        const double a = kr.top_eigenvalues[i], b = orp.top_eigenvalues[i];
        if (std::abs(a) <= 1e-6 * scale) break;
        worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    rc.max_rel_eig_diff = worst;
    return rc;
}

// Interior Frobenius distance between two same-grid matrices, absolute and
// relative to the first argument.
struct BlockDistance {
    double absolute = 0.0;
    double relative = 0.0;
};

inline BlockDistance interior_frobenius_diff(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                             const GridSpec& grid, double fraction = 0.5) {
    const Eigen::MatrixXcd Ai = interior_block(A, grid, fraction);
    const Eigen::MatrixXcd Bi = interior_block(B, grid, fraction);
    BlockDistance d;
    d.absolute = (Ai - Bi).norm();
    const double ref = Ai.norm();
    d.relative = ref > 0.0 ? d.absolute / ref : d.absolute;
    return d;
}

// Parameter sweeps along three one-parameter families through the tanh pair.
enum class ProbeFamily { nonmonotone_bump, monotone_ramp, width_mismatch };

inline std::string probe_family_name(ProbeFamily f) {
    switch (f) {
        case ProbeFamily::nonmonotone_bump: return "nonmonotone_bump";
        case ProbeFamily::monotone_ramp: return "monotone_ramp";
        case ProbeFamily::width_mismatch: return "width_mismatch";
    }
    return "unknown";
}

struct ProbeRow {
    std::string family;
    double parameter = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool monotone = true;
    std::string verdict; // "positive" or "indefinite"
};

inline std::vector<ProbeRow> conjecture_probe(ProbeFamily family, const std::vector<double>& parameters,
                                              const GridSpec& grid) {
    grid.validate();
    std::vector<ProbeRow> rows;
    rows.reserve(parameters.size());
    const KatoFunction base_f = single_step(pi / 2.0); // slope 1
    for (double eps : parameters) {
        ProbeRow row;
        row.family = probe_family_name(family);
        row.parameter = eps;
        PositivityReport rep;
        if (family == ProbeFamily::width_mismatch) {
            // product of half-widths a b = (pi/2)(1 + eps)
            const KatoFunction f = single_step(1.0);
            const KatoFunction g = single_step((pi / 2.0) * (1.0 + eps));
            KernelMatrix km = nystrom_assemble(f, g, grid);
            rep = positivity_spectrum(km, total_variation(f) * total_variation(g) / (2.0 * pi));
            row.monotone = true;
        } else {
            SampledFunction gs;
            gs.x0 = -grid.L;
            gs.dx = grid.h();
            gs.values.resize(static_cast<std::size_t>(grid.N));
            gs.derivative.emplace(static_cast<std::size_t>(grid.N));
            bool monotone = true;
            for (int j = 0; j < grid.N; ++j) {
                const double x = grid.x(j);
                const double sh = sech(x);
                double v = std::tanh(x), d = sh * sh;
                if (family == ProbeFamily::nonmonotone_bump) {
                    // perturbation eps * d/dx exp(-(x-2)^2 / (2 sigma^2))
                    const double sigma = 0.35, x0 = 2.0;
                    const double b = std::exp(-(x - x0) * (x - x0) / (2.0 * sigma * sigma));
                    v += eps * (-(x - x0) / (sigma * sigma)) * b;
                    d += eps * ((x - x0) * (x - x0) / (sigma * sigma * sigma * sigma) - 1.0 / (sigma * sigma)) * b;
                } else {
                    // monotone erf ramp: bounded, increasing, but not of strip class
                    const double s = 0.4, x0 = 1.5;
                    const double u = (x - x0) / s;
                    v += eps * 0.5 * (1.0 + std::erf(u / std::sqrt(2.0)));
                    d += eps * std::exp(-u * u / 2.0) / (s * std::sqrt(2.0 * pi));
                }
                gs.values[static_cast<std::size_t>(j)] = v;
                (*gs.derivative)[static_cast<std::size_t>(j)] = d;
                if (d < 0.0) monotone = false;
            }
            gs.limit_left = -1.0;
            gs.limit_right = family == ProbeFamily::monotone_ramp ? 1.0 + eps : 1.0;
            gs.monotone = monotone;
            gs.refresh_sup();
            row.monotone = monotone;
            KernelMatrix km = nystrom_assemble(base_f, gs, grid);
            rep = positivity_spectrum(km.M);
        }
        row.min_eigenvalue = rep.min_eigenvalue;
        row.max_eigenvalue = rep.top_eigenvalues.empty() ? 0.0 : rep.top_eigenvalues.front();
        row.verdict = rep.psd_verdict ? "positive" : "indefinite";
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace commlab
