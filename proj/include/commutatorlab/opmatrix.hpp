#pragma once

// Operator-side discretizations on the periodic grid.
//
// g(Q) is multiplication by g(x_j). f(P) is the circulant with symbol
// samples f(xi_k): conjugating diag(f(xi_k)) by the centered unitary DFT
// gives entries c_{(j-k) mod N} with c_m = (1/N) sum_k f(xi_k) e^{2 pi i k m / N},
// so the spectrum of f(P) is exactly the sample set {f(xi_k)}.
//
// The discrete commutator C = i (f(P) g(Q) - g(Q) f(P)) carries two wrap
// artifacts. In position, g jumps across the periodic boundary, planting
// O(1) entries in the outer corners; spectral statements about the line
// operator therefore restrict to the interior principal submatrix
// |x_j| <= L/2, and the largest entry outside that block is reported as
// the boundary leak. In momentum, a step-type symbol does not vanish at
// the zone edge (tanh(+xi_max) wraps to tanh(-xi_max), a jump of size
// 2 mass), so the circulant differs from the line operator f(P) by a
// discrete-Hilbert tail modulated to the Nyquist frequency. That term is
// invisible to band-limited vectors but contributes order-one spurious
// eigenvalues no matter how large N and L are. Spectra are therefore
// evaluated after a congruence M -> B M B with B = chi(P), chi a smooth
// window equal to 1 on the inner part of the zone and 0 near the edge:
// the congruence preserves positive semidefiniteness exactly, leaves
// smooth eigenpairs untouched to band-limiting accuracy, and annihilates
// the zone-edge term.
//
// Two independent positive representations are implemented:
//
//   cosh sandwich   i [tanh(lambda P), g(Q)]
//                     = sech(lambda P) Im g(Q + i lambda) sech(lambda P),
//   manifestly PSD since Im g(. + i lambda) >= 0 inside the strip;
//
//   phase-space form C = (2 pi)^{-1} double-integral of
//                     F[f'](u) F[g'](xi) sinc(u xi / 2) e^{i xi Q} e^{i u P} e^{i u xi / 2}.
//   Since e^{i u P} is an exact node shift when u = m h, the u integral is
//   taken on the grid-aligned trapezoid rule (shift rounding residue is
//   identically zero) and the xi integral by Gauss-Legendre, which collapses
//   each entry to a single frequency sum over xi nodes.
//
// A two-dimensional positive-kernel form is also provided:
//   K2(x, y) = pi^{-1} F[f'](sqrt2 (y1-x1)) F[g'](sqrt2 (y2-x2))
//              e^{i (x1 y2 - x2 y1)} sinc((y1-x1)(y2-x2)).

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "commutatorlab/common.hpp"
#include "commutatorlab/fourier.hpp"
#include "commutatorlab/funcspace.hpp"

namespace commlab {

struct OperatorMatrix {
    Eigen::MatrixXcd M;
    GridSpec grid;
    std::string source;
    bool diagonal = false;
};

// Nodes with |x_j| <= fraction * L, as an index interval [lo, hi).
struct IndexRange {
    int lo = 0;
    int hi = 0;
    int size() const { return hi - lo; }
};

inline IndexRange interior_range(const GridSpec& grid, double fraction = 0.5) {
    IndexRange r{grid.N, 0};
    const double bound = fraction * grid.L + 1e-12 * grid.L;
    for (int j = 0; j < grid.N; ++j) {
        if (std::abs(grid.x(j)) <= bound) {
            r.lo = std::min(r.lo, j);
            r.hi = std::max(r.hi, j + 1);
        }
    }
    if (r.lo >= r.hi) throw std::invalid_argument("interior_range: empty interior");
    return r;
}

inline Eigen::MatrixXcd interior_block(const Eigen::MatrixXcd& M, const GridSpec& grid, double fraction = 0.5) {
    const IndexRange r = interior_range(grid, fraction);
    return M.block(r.lo, r.lo, r.size(), r.size());
}

// Largest entry magnitude with a row or column outside the interior range.
inline double boundary_leak(const Eigen::MatrixXcd& M, const GridSpec& grid, double fraction = 0.5) {
    const IndexRange r = interior_range(grid, fraction);
    double leak = 0.0;
    for (int j = 0; j < grid.N; ++j) {
        for (int k = 0; k < grid.N; ++k) {
            if (j >= r.lo && j < r.hi && k >= r.lo && k < r.hi) continue;
            leak = std::max(leak, std::abs(M(j, k)));
        }
    }
    return leak;
}

// Smooth momentum window: 1 on |xi| <= 0.37 xi_max, 0 beyond ~0.6 xi_max,
// erfc taper in between. The taper width keeps the real-space kernel of
// chi(P) decaying at a Gaussian-like rate, so the window does not drag the
// positional wrap corners into the interior block.
inline std::vector<double> band_window(const GridSpec& grid) {
    std::vector<double> chi(static_cast<std::size_t>(grid.N));
    const double cut = 0.45 * grid.xi_max();
    const double width = 0.08 * grid.xi_max();
    for (int p = 0; p < grid.N; ++p)
        chi[static_cast<std::size_t>(p)] = 0.5 * std::erfc((std::abs(grid.xi_index(p)) - cut) / width);
    return chi;
}

// Congruence M -> chi(P) M chi(P) removing zone-edge (Nyquist) content.
// chi(P) is Hermitian with 0 <= chi <= 1, so positive semidefiniteness is
// preserved in both directions for band-limited spectral content.
inline OperatorMatrix band_compress(const OperatorMatrix& in) {
    const GridSpec& grid = in.grid;
    const int N = grid.N;
    const std::vector<double> chi = band_window(grid);
    auto apply_columns = [&](const Eigen::MatrixXcd& M) {
        Eigen::MatrixXcd out(N, N);
        parallel_for(N, [&](int lo, int hi) {
            std::vector<complexd> col(static_cast<std::size_t>(N));
            for (int k = lo; k < hi; ++k) {
                for (int j = 0; j < N; ++j) col[static_cast<std::size_t>(j)] = M(j, k);
                auto hat = dft_forward(grid, col);
                for (int p = 0; p < N; ++p) hat[static_cast<std::size_t>(p)] *= chi[static_cast<std::size_t>(p)];
                auto back = dft_inverse(grid, hat);
                for (int j = 0; j < N; ++j) out(j, k) = back[static_cast<std::size_t>(j)];
            }
        });
        return out;
    };
    OperatorMatrix op;
    op.grid = grid;
    op.source = in.source + ", band-compressed";
    op.diagonal = false;
    // B M B with Hermitian B: (B (B M)^H)^H = B M B^H = B M B.
    op.M = apply_columns(apply_columns(in.M).adjoint()).adjoint();
    return op;
}

inline OperatorMatrix build_gQ(const KatoFunction& g, const GridSpec& grid) {
    grid.validate();
    OperatorMatrix op;
    op.grid = grid;
    op.source = "multiplication operator";
    op.diagonal = true;
    op.M = Eigen::MatrixXcd::Zero(grid.N, grid.N);
    for (int j = 0; j < grid.N; ++j) op.M(j, j) = kato_eval(g, grid.x(j));
    return op;
}

inline OperatorMatrix build_gQ(const SampledFunction& g, const GridSpec& grid) {
    grid.validate();
    g.validate();
    if (static_cast<int>(g.size()) != grid.N) throw std::invalid_argument("build_gQ: sample length mismatch");
    OperatorMatrix op;
    op.grid = grid;
    op.source = "multiplication operator, sampled";
    op.diagonal = true;
    op.M = Eigen::MatrixXcd::Zero(grid.N, grid.N);
    for (int j = 0; j < grid.N; ++j) op.M(j, j) = g.values[static_cast<std::size_t>(j)];
    return op;
}

// Circulant with the given momentum symbol samples, indexed p = k + N/2.
inline OperatorMatrix build_fP_symbol(const std::vector<double>& symbol, const GridSpec& grid,
                                      std::string source = "momentum symbol operator") {
    grid.validate();
    const int N = grid.N;
    if (static_cast<int>(symbol.size()) != N) throw std::invalid_argument("build_fP_symbol: length mismatch");
    std::vector<complexd> arr(static_cast<std::size_t>(N));
    for (int p = 0; p < N; ++p) {
        const int k = p - N / 2;
        arr[static_cast<std::size_t>((k + N) % N)] = symbol[static_cast<std::size_t>(p)];
    }
    auto c = detail::dft_raw(std::move(arr), +1);
    for (auto& z : c) z /= static_cast<double>(N);
    OperatorMatrix op;
    op.grid = grid;
    op.source = std::move(source);
    op.M.resize(N, N);
    for (int j = 0; j < N; ++j) {
        for (int l = 0; l < N; ++l) {
            op.M(j, l) = c[static_cast<std::size_t>(((j - l) % N + N) % N)];
        }
    }
    return op;
}

inline OperatorMatrix build_fP(const KatoFunction& f, const GridSpec& grid) {
    grid.validate();
    std::vector<double> symbol(static_cast<std::size_t>(grid.N));
    for (int p = 0; p < grid.N; ++p) symbol[static_cast<std::size_t>(p)] = kato_eval(f, grid.xi_index(p));
    return build_fP_symbol(symbol, grid, "momentum operator");
}

// i (A B - B A). Uses the O(N^2) path when either factor is diagonal.
inline OperatorMatrix commutator_matrix(const OperatorMatrix& A, const OperatorMatrix& B) {
    if (!A.grid.same_as(B.grid)) throw std::invalid_argument("commutator_matrix: grid mismatch");
    const int N = A.grid.N;
    OperatorMatrix op;
    op.grid = A.grid;
    op.source = "commutator";
    op.M.resize(N, N);
    const complexd iu{0.0, 1.0};
    if (B.diagonal) {
        for (int j = 0; j < N; ++j) {
            for (int k = 0; k < N; ++k) {
                op.M(j, k) = iu * A.M(j, k) * (B.M(k, k) - B.M(j, j));
            }
        }
    } else if (A.diagonal) {
        for (int j = 0; j < N; ++j) {
            for (int k = 0; k < N; ++k) {
                op.M(j, k) = iu * B.M(j, k) * (A.M(j, j) - A.M(k, k));
            }
        }
    } else {
        op.M = iu * (A.M * B.M - B.M * A.M);
    }
    return op;
}

// sech(lambda P) Im g(Q + i lambda) sech(lambda P); PSD by construction
// because the middle factor is a nonnegative diagonal. Requires g analytic
// past height lambda, i.e. a > lambda.
inline OperatorMatrix cosh_sandwich(double lambda, const KatoFunction& g, const GridSpec& grid) {
    grid.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("cosh_sandwich: need lambda > 0");
    if (!(g.a > lambda)) throw std::domain_error("cosh_sandwich: requires strip half-width a > lambda");
    const int N = grid.N;
    std::vector<double> symbol(static_cast<std::size_t>(N));
    for (int p = 0; p < N; ++p) symbol[static_cast<std::size_t>(p)] = sech(lambda * grid.xi_index(p));
    OperatorMatrix A = build_fP_symbol(symbol, grid, "sech(lambda P)");
    Eigen::VectorXd d(N);
    for (int j = 0; j < N; ++j) d(j) = im_continuation(g, grid.x(j), lambda);
    Eigen::MatrixXcd T = A.M;
    for (int k = 0; k < N; ++k) T.col(k) *= d(k);
    OperatorMatrix op;
    op.grid = grid;
    op.source = "cosh sandwich";
    op.M = T * A.M;
    return op;
}

struct WeylOptions {
    double shift_cutoff = 0.0;     // U; 0 picks 28 / min(a_f, a_g)
    double frequency_cutoff = 0.0; // Xi; 0 picks 28 / min(a_f, a_g)
    int frequency_nodes = 0;       // 0 picks a resolution-matched count
};

// Phase-space assembly of i [f(P), g(Q)]. With grid-aligned shifts u = m h
// the double integral collapses entrywise:
//
//   C(j, j+m) = (h / 2 pi) F[f'](m h) sum_r w_r F[g'](xi_r)
//               sinc(m h xi_r / 2) e^{i xi_r (x_j + m h / 2)}.
inline OperatorMatrix weyl_representation(const KatoFunction& f, const KatoFunction& g, const GridSpec& grid,
                                          WeylOptions opt = {}) {
    grid.validate();
    const int N = grid.N;
    const double h = grid.h();
    const double amin = std::min(f.a, g.a);
    double U = opt.shift_cutoff > 0.0 ? opt.shift_cutoff : 28.0 / amin;
    U = std::min(U, 2.0 * grid.L - h);
    const double Xi = opt.frequency_cutoff > 0.0 ? opt.frequency_cutoff : 28.0 / amin;
    const int mmax = static_cast<int>(std::floor(U / h + 1e-12));
    const int Mu = 2 * mmax + 1;
    const double phase_span = grid.L + 0.5 * U + 1.0;
    int R = opt.frequency_nodes > 0
                ? opt.frequency_nodes
                : std::min(2048, std::max(160, static_cast<int>(Xi * phase_span / 2.0) + 80));
    const QuadratureRule rule = scale_rule(gauss_legendre(R), -Xi, Xi);

    std::vector<complexd> fhat(static_cast<std::size_t>(Mu));
    for (int m = -mmax; m <= mmax; ++m) fhat[static_cast<std::size_t>(m + mmax)] = ft_measure(f, m * h);

    Eigen::MatrixXcd coeff(R, Mu);
    Eigen::MatrixXcd phases(R, N);
    parallel_for(R, [&](std::ptrdiff_t lo, std::ptrdiff_t hi) {
        for (std::ptrdiff_t r = lo; r < hi; ++r) {
            const double xi = rule.nodes[static_cast<std::size_t>(r)];
            const complexd ghat = ft_measure(g, xi);
            const complexd base = rule.weights[static_cast<std::size_t>(r)] * ghat * (h / (2.0 * pi));
            for (int m = -mmax; m <= mmax; ++m) {
                const double u = m * h;
                coeff(r, m + mmax) = base * fhat[static_cast<std::size_t>(m + mmax)] * sinc(0.5 * u * xi) *
                                     std::polar(1.0, 0.5 * xi * u);
            }
            for (int j = 0; j < N; ++j) phases(r, j) = std::polar(1.0, xi * grid.x(j));
        }
    });

    const Eigen::MatrixXcd T = coeff.transpose() * phases; // (Mu x N)

    OperatorMatrix op;
    op.grid = grid;
    op.source = "phase-space representation";
    op.M = Eigen::MatrixXcd::Zero(N, N);
    for (int j = 0; j < N; ++j) {
        for (int m = -mmax; m <= mmax; ++m) {
            const int k = j + m;
            if (k < 0 || k >= N) continue;
            op.M(j, k) = T(m + mmax, j);
        }
    }
    return op;
}

using TransformFn = std::function<complexd(double)>;

// Gaussian-coherent positivity field
//
//   I(x, y) = double-integral e^{-(xi^2+u^2)/4} e^{i (xi x + u y)}
//             (sin(xi u / 2) / (xi u)) F[f'](u) F[g'](xi) du dxi,
//
// real up to rounding, and nonnegative whenever the pair is positivity
// preserving. Evaluated separably on a square scan grid.
struct CoherentField {
    std::vector<double> xs;
    std::vector<double> ys;
    Eigen::MatrixXd values; // values(i, j) = I(xs[i], ys[j])
    double min_value = 0.0;
    double max_value = 0.0;
    double max_abs_imag = 0.0;
};

inline CoherentField coherent_scan_ft(const TransformFn& fhat, const TransformFn& ghat, double extent,
                                      int points, int nodes = 0) {
    if (points < 2 || !(extent > 0.0)) throw std::invalid_argument("coherent_scan: bad scan window");
    const double cutoff = 13.0;
    const int R = nodes > 0 ? nodes : std::max(128, static_cast<int>(cutoff * (extent + 3.0) / 2.0) + 64);
    const QuadratureRule rule = scale_rule(gauss_legendre(R), -cutoff, cutoff);

    CoherentField field;
    field.xs.resize(static_cast<std::size_t>(points));
    field.ys.resize(static_cast<std::size_t>(points));
    const double step = 2.0 * extent / (points - 1);
    for (int i = 0; i < points; ++i) field.xs[static_cast<std::size_t>(i)] = -extent + i * step;
    field.ys = field.xs;

    // Inner xi sum for every (u node, x scan point).
    Eigen::MatrixXcd B(R, points);
    parallel_for(R, [&](std::ptrdiff_t lo, std::ptrdiff_t hi) {
        for (std::ptrdiff_t s = lo; s < hi; ++s) {
            const double u = rule.nodes[static_cast<std::size_t>(s)];
            for (int i = 0; i < points; ++i) {
                complexd acc{0.0, 0.0};
                for (int r = 0; r < R; ++r) {
                    const double xi = rule.nodes[static_cast<std::size_t>(r)];
                    const complexd gh = ghat(xi);
                    acc += rule.weights[static_cast<std::size_t>(r)] * std::exp(-xi * xi / 4.0) * gh *
                           (0.5 * sinc(0.5 * xi * u)) *
                           std::polar(1.0, xi * field.xs[static_cast<std::size_t>(i)]);
                }
                B(s, i) = acc;
            }
        }
    });

    field.values.resize(points, points);
    double min_v = 0.0, max_v = 0.0, max_im = 0.0;
    bool first = true;
    for (int i = 0; i < points; ++i) {
        for (int j = 0; j < points; ++j) {
            complexd acc{0.0, 0.0};
            for (int s = 0; s < R; ++s) {
                const double u = rule.nodes[static_cast<std::size_t>(s)];
                acc += rule.weights[static_cast<std::size_t>(s)] * std::exp(-u * u / 4.0) * fhat(u) *
                       std::polar(1.0, u * field.ys[static_cast<std::size_t>(j)]) * B(s, i);
            }
            field.values(i, j) = acc.real();
            max_im = std::max(max_im, std::abs(acc.imag()));
            if (first) {
                min_v = max_v = acc.real();
                first = false;
            } else {
                min_v = std::min(min_v, acc.real());
                max_v = std::max(max_v, acc.real());
            }
        }
    }
    field.min_value = min_v;
    field.max_value = max_v;
    field.max_abs_imag = max_im;
    return field;
}

inline CoherentField coherent_scan(const KatoFunction& f, const KatoFunction& g, double extent, int points,
                                   int nodes = 0) {
    return coherent_scan_ft([&](double u) { return ft_measure(f, u); },
                            [&](double xi) { return ft_measure(g, xi); }, extent, points, nodes);
}

// Two-dimensional positive-kernel form.
inline complexd kernel2d_eval(const KatoFunction& f, const KatoFunction& g, double x1, double x2, double y1,
                              double y2) {
    const double r2 = std::sqrt(2.0);
    const complexd ff = ft_measure(f, r2 * (y1 - x1));
    const complexd gg = ft_measure(g, r2 * (y2 - x2));
    const complexd phase = std::polar(1.0, x1 * y2 - x2 * y1);
    return (1.0 / pi) * ff * gg * phase * sinc((y1 - x1) * (y2 - x2));
}

// Midpoint-rule Nystrom matrix of the 2D kernel on [-half, half]^2 with
// points_per_axis nodes per axis; row index is i1 * n + i2.
inline Eigen::MatrixXcd kernel2d_assemble(const KatoFunction& f, const KatoFunction& g, double half,
                                          int points_per_axis) {
    if (points_per_axis < 2 || !(half > 0.0)) throw std::invalid_argument("kernel2d_assemble: bad grid");
    const int n = points_per_axis;
    const double step = 2.0 * half / n;
    std::vector<double> nodes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) nodes[static_cast<std::size_t>(i)] = -half + (i + 0.5) * step;
    const double w = step * step; // sqrt(w) * sqrt(w)
    Eigen::MatrixXcd M(n * n, n * n);
    parallel_for(n * n, [&](std::ptrdiff_t lo, std::ptrdiff_t hi) {
        for (std::ptrdiff_t row = lo; row < hi; ++row) {
            const int i1 = static_cast<int>(row) / n;
            const int i2 = static_cast<int>(row) % n;
            for (int col = 0; col < n * n; ++col) {
                const int k1 = col / n;
                const int k2 = col % n;
                M(row, col) = w * kernel2d_eval(f, g, nodes[static_cast<std::size_t>(i1)],
                                                nodes[static_cast<std::size_t>(i2)],
                                                nodes[static_cast<std::size_t>(k1)],
                                                nodes[static_cast<std::size_t>(k2)]);
            }
        }
    });
    return M;
}

} // namespace commlab
