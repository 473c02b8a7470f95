#pragma once

// Shared numerical utilities: overflow-safe hyperbolic helpers, small-argument
// series for removable singularities, Gauss-Legendre rules, deterministic
// uniform variates, and a fixed-chunk parallel loop whose results do not
// depend on the worker count.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace commlab {

inline constexpr double pi = std::numbers::pi;

using complexd = std::complex<double>;

// sech(t) without overflow for any t.
inline double sech(double t) {
    const double e = std::exp(-std::abs(t));
    return 2.0 * e / (1.0 + e * e);
}

// sinh(t)/t with the removable singularity filled by its Taylor series.
inline double sinhc(double t) {
    const double t2 = t * t;
    if (std::abs(t) < 1e-4) {
        return 1.0 + t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sinh(t) / t;
}

// sin(t)/t with the removable singularity filled by its Taylor series.
inline double sinc(double t) {
    const double t2 = t * t;
    if (std::abs(t) < 1e-4) {
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(t) / t;
}

// t/sinh(t), even, decaying like 2|t|e^{-|t|}; underflows cleanly to 0.
inline double t_over_sinh(double t) {
    const double a = std::abs(t);
    if (a < 1e-4) {
        const double t2 = t * t;
        return 1.0 - t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
    }
    if (a > 700.0) {
        // sinh(t) ~ sign(t) e^{|t|}/2 beyond double range; fold the exponential in.
        return 2.0 * a * std::exp(-a);
    }
    return t / std::sinh(t);
}

// sinh(A) * sech(B) * sech(C) evaluated in the exponential domain.
// Safe whenever |A| <= |B| + |C| + O(1), which holds for the difference
// quotients used below (A = B - C).
inline double sinh_sech_sech(double A, double B, double C) {
    const double aA = std::abs(A), aB = std::abs(B), aC = std::abs(C);
    if (aB < 350.0 && aC < 350.0 && aA < 700.0) {
        return std::sinh(A) * sech(B) * sech(C);
    }
    const double sign = (A > 0.0) ? 1.0 : (A < 0.0 ? -1.0 : 0.0);
    const double scale = std::exp(aA - aB - aC);
    const double num = sign * 2.0 * (1.0 - std::exp(-2.0 * aA)) * scale;
    const double den = (1.0 + std::exp(-2.0 * aB)) * (1.0 + std::exp(-2.0 * aC));
    return num / den;
}

// Gauss-Legendre nodes and weights on [-1, 1], found by Newton iteration on
// the Legendre polynomial recurrence. Nodes come out symmetric.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

// Maps a [-1,1] rule onto [lo, hi].
inline QuadratureRule scale_rule(const QuadratureRule& base, double lo, double hi) {
    QuadratureRule out = base;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
        out.nodes[i] = mid + half * base.nodes[i];
        out.weights[i] = half * base.weights[i];
    }
    return out;
}

// Uniform double in [-1, 1) built from the top 53 bits of the generator
// output, so streams are identical across platforms and library versions.
template <class Gen>
double uniform_symmetric(Gen& gen) {
    const std::uint64_t bits = static_cast<std::uint64_t>(gen());
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53; // [0, 1)
    return 2.0 * u - 1.0;
}

inline unsigned worker_count() {
    static const unsigned n = [] {
        if (const char* env = std::getenv("COMMUTATORLAB_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && v > 0) return static_cast<unsigned>(std::min<long>(v, 256));
        }
        const unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1u : hc;
    }();
    return n;
}

// Runs body(begin, end) over a fixed chunk grid that depends only on n.
// Chunks write disjoint outputs, so the result is identical for any number
// of workers, including one.
template <class Body>
void parallel_for(std::ptrdiff_t n, Body&& body) {
    if (n <= 0) return;
    const std::ptrdiff_t chunk = std::max<std::ptrdiff_t>(1, (n + 63) / 64);
    const std::ptrdiff_t nchunks = (n + chunk - 1) / chunk;
    const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(nchunks));
    if (workers <= 1) {
        body(std::ptrdiff_t{0}, n);
        return;
    }
    std::atomic<std::ptrdiff_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (;;) {
            const std::ptrdiff_t c = next.fetch_add(1);
            if (c >= nchunks || failed.load()) return;
            const std::ptrdiff_t lo = c * chunk;
            const std::ptrdiff_t hi = std::min(n, lo + chunk);
            try {
                body(lo, hi);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

} // namespace commlab
