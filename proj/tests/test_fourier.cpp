// Tests for the transform layer: grid geometry, closed-form measure
// transforms, the quadrature transform, and the unitary centered DFT.

#include "catch2/catch_amalgamated.hpp"
#include "commutatorlab/fourier.hpp"

#include <cmath>
#include <random>

using namespace commlab;

TEST_CASE("grid_spec_geometry_and_validation") {
    GridSpec grid(10.0, 64);
    CHECK(std::abs(grid.h() - 20.0 / 64.0) < 1e-15);
    CHECK(std::abs(grid.x(0) + 10.0) < 1e-15);
    CHECK(std::abs(grid.x(32)) < 1e-15);
    // momentum nodes are the exact DFT dual: spacing pi/L, centered
    CHECK(std::abs(grid.xi_index(32)) < 1e-15);
    CHECK(std::abs(grid.xi_index(33) - pi / 10.0) < 1e-15);
    CHECK(std::abs(grid.xi_max() - pi * 64 / 20.0) < 1e-15);
    // trapezoid weights sum to the box length
    CHECK(std::abs(grid.weight() * grid.N - 2.0 * grid.L) < 1e-12);
    CHECK(grid.same_as(GridSpec(10.0, 64)));
    CHECK(!grid.same_as(GridSpec(10.0, 128)));

    CHECK_THROWS_AS(GridSpec(-1.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(10.0, 63), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(10.0, 2), std::invalid_argument);
}

TEST_CASE("ft_measure_at_zero_and_symmetry") {
    KatoFunction f = single_step(1.0);
    // value at 0 is [f]/sqrt(2 pi) = sqrt(2/pi) for unit mass
    CHECK(std::abs(ft_measure(f, 0.0).real() - std::sqrt(2.0 / pi)) < 1e-15);
    CHECK(std::abs(ft_measure(f, 0.0).imag()) < 1e-15);

    // centered atom: purely real and even
    for (double xi : {0.3, 1.7, 6.0}) {
        CHECK(std::abs(ft_measure(f, xi).imag()) < 1e-15);
        CHECK(std::abs(ft_measure(f, xi).real() - ft_measure(f, -xi).real()) < 1e-15);
    }

    // hermitian symmetry for an off-center mixture
    KatoFunction mix;
    mix.a = 0.8;
    mix.measure.atoms = {{-1.0, 0.5}, {2.0, 0.25}};
    for (double xi : {0.4, 1.1, 3.3}) {
        const complexd plus = ft_measure(mix, xi);
        const complexd minus = ft_measure(mix, -xi);
        CHECK(std::abs(plus - std::conj(minus)) < 1e-15);
    }
}

TEST_CASE("ft_measure_matches_quadrature_oracle") {
    // Oracle: trapezoid transform of the derivative profile on a wide grid.
    GridSpec grid(40.0, 4096);
    KatoFunction f;
    f.a = 1.0;
    f.measure.atoms = {{1.0, 0.5}};

    std::vector<double> samples(static_cast<std::size_t>(grid.N));
    for (int j = 0; j < grid.N; ++j) samples[static_cast<std::size_t>(j)] = kato_derivative(f, grid.x(j));
    const std::vector<double> freqs = {0.0, 0.5, 2.0, 5.0};
    QuadratureTransform q = ft_quadrature(grid, samples, freqs);
    CHECK(!q.truncation_warning);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        CHECK(std::abs(ft_measure(f, freqs[i]) - q.values[i]) < 1e-8);
    }

    // density-backed measure goes through the same closed form
    KatoFunction fd;
    fd.a = 1.0;
    AtomicMeasure::Density d;
    d.x0 = -1.0;
    d.dx = 0.01;
    d.values.resize(201);
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        const double t = d.x0 + static_cast<double>(i) * d.dx;
        d.values[i] = 1.0 - std::abs(t); // unit-mass hat profile
    }
    fd.measure.density = d;
    for (int j = 0; j < grid.N; ++j) samples[static_cast<std::size_t>(j)] = kato_derivative(fd, grid.x(j));
    QuadratureTransform qd = ft_quadrature(grid, samples, freqs);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        CHECK(std::abs(ft_measure(fd, freqs[i]) - qd.values[i]) < 1e-7);
    }
}

TEST_CASE("ft_measure_series_continuity_near_zero") {
    KatoFunction f = single_step(1.0);
    // the xi/sinh factor switches to its series below |a xi| = 1e-4; the two
    // branches must agree across the cutover far below the smooth variation
    const complexd below = ft_measure(f, 0.999999e-4);
    const complexd above = ft_measure(f, 1.000001e-4);
    CHECK(std::abs(below - above) < 1e-14 * std::abs(above));
    CHECK(std::abs(ft_measure(f, 1e-9).real() - std::sqrt(2.0 / pi)) < 1e-15);
}

TEST_CASE("ft_measure_bound_and_decay_envelope") {
    KatoFunction f = single_step(1.0);
    const double bound = total_variation(f) / std::sqrt(2.0 * pi);
    for (int i = 0; i <= 400; ++i) {
        const double xi = -20.0 + 0.1 * i;
        CHECK(std::abs(ft_measure(f, xi)) <= bound * (1.0 + 1e-15));
    }
    // fitted envelope C |xi| e^{-a |xi|} with C = 2 for the unit atom, a = 1
    for (double xi = 1.0; xi <= 40.0; xi += 0.37) {
        CHECK(std::abs(ft_measure(f, xi)) <= 2.0 * xi * std::exp(-f.a * xi));
    }
}

TEST_CASE("ft_quadrature_gaussian_pair_and_truncation_flag") {
    // Closed-form pair: exp(-x^2/2) transforms to exp(-xi^2/2).
    GridSpec grid(16.0, 512);
    std::vector<double> gauss(static_cast<std::size_t>(grid.N));
    for (int j = 0; j < grid.N; ++j) {
        const double x = grid.x(j);
        gauss[static_cast<std::size_t>(j)] = std::exp(-x * x / 2.0);
    }
    const std::vector<double> freqs = {0.0, 0.5, 1.0, 2.0, 3.5};
    QuadratureTransform q = ft_quadrature(grid, gauss, freqs);
    CHECK(!q.truncation_warning);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        CHECK(std::abs(q.values[i] - std::exp(-freqs[i] * freqs[i] / 2.0)) < 1e-12);
    }

    // a slowly decaying profile trips the truncation warning
    std::vector<double> wide(static_cast<std::size_t>(grid.N));
    for (int j = 0; j < grid.N; ++j) wide[static_cast<std::size_t>(j)] = 1.0 / std::cosh(grid.x(j) / 10.0);
    CHECK(ft_quadrature(grid, wide, freqs).truncation_warning);
}

TEST_CASE("dft_forward_unitarity_and_roundtrip") {
    GridSpec grid(12.0, 256);
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<complexd> v(static_cast<std::size_t>(grid.N));
    for (auto& z : v) z = complexd{u(gen), u(gen)};

    auto vhat = dft_forward(grid, v);
    double n2 = 0.0, nh2 = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        n2 += std::norm(v[j]);
        nh2 += std::norm(vhat[j]);
    }
    CHECK(std::abs(n2 - nh2) < 1e-12 * n2); // Parseval

    auto back = dft_inverse(grid, vhat);
    double worst = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) worst = std::max(worst, std::abs(back[j] - v[j]));
    CHECK(worst < 1e-12);

    // constant input concentrates on the zero-frequency bin
    std::vector<complexd> ones(static_cast<std::size_t>(grid.N), complexd{1.0, 0.0});
    auto chat = dft_forward(grid, ones);
    CHECK(std::abs(chat[static_cast<std::size_t>(grid.N / 2)] - std::sqrt(static_cast<double>(grid.N))) < 1e-12);
    for (int p = 0; p < grid.N; ++p) {
        if (p != grid.N / 2) CHECK(std::abs(chat[static_cast<std::size_t>(p)]) < 1e-12);
    }

    std::vector<complexd> wrong(3);
    CHECK_THROWS_AS(dft_forward(grid, wrong), std::invalid_argument);
    CHECK_THROWS_AS(dft_inverse(grid, wrong), std::invalid_argument);
}

TEST_CASE("dft_gaussian_matches_continuum_transform") {
    // The unitary DFT rescaled by h sqrt(N / 2 pi) approximates the
    // continuum transform; for the self-dual gaussian both sides are known.
    GridSpec grid(16.0, 512);
    std::vector<complexd> v(static_cast<std::size_t>(grid.N));
    for (int j = 0; j < grid.N; ++j) {
        const double x = grid.x(j);
        v[static_cast<std::size_t>(j)] = std::exp(-x * x / 2.0);
    }
    auto vhat = dft_forward(grid, v);
    const double scale = grid.h() * std::sqrt(static_cast<double>(grid.N) / (2.0 * pi));
    double worst = 0.0;
    for (int p = 0; p < grid.N; ++p) {
        const double xi = grid.xi_index(p);
        worst = std::max(worst, std::abs(scale * vhat[static_cast<std::size_t>(p)] - std::exp(-xi * xi / 2.0)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("dft_naive_agrees_with_fft") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<complexd> v(8);
    for (auto& z : v) z = complexd{u(gen), u(gen)};
    auto fast = detail::dft_raw(v, -1);
    auto slow = detail::dft_naive(v, -1);
    for (std::size_t j = 0; j < v.size(); ++j) CHECK(std::abs(fast[j] - slow[j]) < 1e-12);

    // non power-of-two sizes run through the direct sum and stay unitary
    GridSpec grid(5.0, 6);
    std::vector<complexd> w(6);
    for (auto& z : w) z = complexd{u(gen), u(gen)};
    auto back = dft_inverse(grid, dft_forward(grid, w));
    for (std::size_t j = 0; j < w.size(); ++j) CHECK(std::abs(back[j] - w[j]) < 1e-12);
}
