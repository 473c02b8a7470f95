#pragma once

// Fourier layer. Everything uses the unitary convention
//
//     (F h)(xi) = (2 pi)^{-1/2} integral e^{-i x xi} h(x) dx,
//
// so F is an isometry and F^{-1} carries e^{+i x xi}.
//
// Grids pair N uniform position nodes x_j = -L + j (2L/N) on [-L, L) with
// N momentum nodes xi_k = pi k / L for k = -N/2 .. N/2 - 1. The position
// quadrature is the periodic trapezoid rule (uniform weight 2L/N), and the
// two grids are exchanged by a unitary centered DFT.
//
// The closed-form transform of the derivative profile of a strip-class
// function: one atom (t, w) of half-width a contributes
//
//     w e^{-i xi t} sqrt(2/pi) (a xi) / sinh(a xi),
//
// so the full transform is sqrt(2/pi) (a xi)/sinh(a xi) times the transform
// of the measure itself. At xi = 0 this equals [f]/sqrt(2 pi) with
// [f] = 2 |nu|, and it decays like e^{-a |xi|}.

#include <vector>

#include "commutatorlab/common.hpp"
#include "commutatorlab/funcspace.hpp"

namespace commlab {

struct GridSpec {
    double L = 20.0;
    int N = 512;

    GridSpec() = default;
    GridSpec(double L_, int N_) : L(L_), N(N_) { validate(); }

    void validate() const {
        if (!(L > 0.0)) throw std::invalid_argument("GridSpec: need L > 0");
        if (N < 4 || N % 2 != 0) throw std::invalid_argument("GridSpec: need even N >= 4");
    }

    double h() const { return 2.0 * L / N; }
    double x(int j) const { return -L + j * h(); }
    // Momentum node for k in [-N/2, N/2); the accessor takes the storage
    // index p = k + N/2 in 0..N-1.
    double xi_index(int p) const { return pi * (p - N / 2) / L; }
    double xi_max() const { return pi * N / (2.0 * L); }
    double weight() const { return h(); }

    bool same_as(const GridSpec& o) const { return N == o.N && std::abs(L - o.L) <= 1e-12 * (std::abs(L) + 1.0); }
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

namespace detail {

// Iterative radix-2 transform with a precomputed twiddle table; sign = -1
// gives the e^{-2 pi i jk/N} sum, sign = +1 its conjugate. No normalization.
inline void fft_pow2(std::vector<complexd>& a, int sign) {
    const std::size_t n = a.size();
    if (n < 2) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<complexd> tw(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        tw[k] = std::polar(1.0, sign * 2.0 * pi * static_cast<double>(k) / static_cast<double>(n));
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                const complexd w = tw[j * stride];
                const complexd u = a[i + j];
                const complexd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

inline std::vector<complexd> dft_naive(const std::vector<complexd>& a, int sign) {
    const std::size_t n = a.size();
    std::vector<complexd> out(n, complexd{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        complexd acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            acc += a[j] * std::polar(1.0, sign * 2.0 * pi * static_cast<double>(k * j % n) / static_cast<double>(n));
        }
        out[k] = acc;
    }
    return out;
}

// Unnormalized sum_j a_j e^{sign 2 pi i jk / N}.
inline std::vector<complexd> dft_raw(std::vector<complexd> a, int sign) {
    if (is_power_of_two(static_cast<int>(a.size()))) {
        fft_pow2(a, sign);
        return a;
    }
    return dft_naive(a, sign);
}

} // namespace detail

// Unitary centered DFT: out[p] = (1/sqrt N) sum_j e^{-i xi_k x_j} v[j] with
// k = p - N/2. Since xi_k x_j = -pi k + 2 pi k j / N, this is the standard
// DFT up to an alternating sign and an index shift by N/2.
inline std::vector<complexd> dft_forward(const GridSpec& grid, const std::vector<complexd>& v) {
    grid.validate();
    const int N = grid.N;
    if (static_cast<int>(v.size()) != N) throw std::invalid_argument("dft_forward: length mismatch");
    auto w = detail::dft_raw(v, -1);
    std::vector<complexd> out(static_cast<std::size_t>(N));
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (int p = 0; p < N; ++p) {
        const int k = p - N / 2;
        const double parity = (k & 1) ? -1.0 : 1.0;
        out[static_cast<std::size_t>(p)] = parity * scale * w[static_cast<std::size_t>((p + N / 2) % N)];
    }
    return out;
}

inline std::vector<complexd> dft_inverse(const GridSpec& grid, const std::vector<complexd>& vhat) {
    grid.validate();
    const int N = grid.N;
    if (static_cast<int>(vhat.size()) != N) throw std::invalid_argument("dft_inverse: length mismatch");
    std::vector<complexd> y(static_cast<std::size_t>(N));
    for (int p = 0; p < N; ++p) {
        const int k = p - N / 2;
        const double parity = (k & 1) ? -1.0 : 1.0;
        y[static_cast<std::size_t>((p + N / 2) % N)] = parity * vhat[static_cast<std::size_t>(p)];
    }
    auto w = detail::dft_raw(std::move(y), +1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (auto& z : w) z *= scale;
    return w;
}

// Closed-form transform of the derivative profile f' of a strip-class
// function: sqrt(2/pi) * (a xi)/sinh(a xi) * (measure transform at xi).
inline complexd ft_measure(const KatoFunction& f, double xi) {
    const double shape = std::sqrt(2.0 / pi) * t_over_sinh(f.a * xi);
    complexd measure_hat{0.0, 0.0};
    for (const auto& [t, w] : f.measure.atoms) {
        measure_hat += w * complexd{std::cos(xi * t), -std::sin(xi * t)};
    }
    if (f.measure.density) {
        const auto& d = *f.measure.density;
        const std::size_t n = d.values.size();
        complexd acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            const double weight = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
            const double t = d.x0 + static_cast<double>(i) * d.dx;
            acc += weight * d.values[i] * complexd{std::cos(xi * t), -std::sin(xi * t)};
        }
        measure_hat += acc * d.dx;
    }
    return shape * measure_hat;
}

// Trapezoid-rule transform of samples on the grid, evaluated at arbitrary
// frequencies. Flags truncation when the samples have not decayed at the
// ends of the box.
struct QuadratureTransform {
    std::vector<complexd> values;
    bool truncation_warning = false;
};

inline QuadratureTransform ft_quadrature(const GridSpec& grid, const std::vector<double>& samples,
                                         const std::vector<double>& frequencies) {
    grid.validate();
    if (static_cast<int>(samples.size()) != grid.N) throw std::invalid_argument("ft_quadrature: length mismatch");
    double sup = 0.0;
    for (double v : samples) sup = std::max(sup, std::abs(v));
    QuadratureTransform out;
    out.truncation_warning =
        sup > 0.0 && std::max(std::abs(samples.front()), std::abs(samples.back())) > 1e-8 * sup;
    out.values.resize(frequencies.size());
    const double h = grid.h();
    const double norm = h / std::sqrt(2.0 * pi);
    for (std::size_t q = 0; q < frequencies.size(); ++q) {
        const double xi = frequencies[q];
        complexd acc{0.0, 0.0};
        for (int j = 0; j < grid.N; ++j) {
            const double x = grid.x(j);
            acc += samples[static_cast<std::size_t>(j)] * complexd{std::cos(xi * x), -std::sin(xi * x)};
        }
        out.values[q] = norm * acc;
    }
    return out;
}

} // namespace commlab
