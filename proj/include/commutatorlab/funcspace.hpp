#pragma once

// Function-space layer: the strip classes of bounded monotone profiles.
//
// A function in the class of half-width a > 0 has the representation
//
//     f(x) = integral tanh(a_hat (x - t)) dnu(t) + c,      a_hat = pi / (2a),
//
// with nu a finite positive measure (point atoms plus an optional sampled
// density) and c a real offset. Such f is bounded, nondecreasing, extends
// analytically to the strip |Im z| < a, and satisfies Im f(z) * Im z >= 0
// there. The half-width a and the slope a_hat are tied together; a_hat is
// always recomputed from a and never stored separately.
//
// The derivative profile is a_hat * sech^2(a_hat (x - t)) per unit of mass,
// so f' > 0 everywhere and the total variation of f equals twice the mass
// of nu.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "commutatorlab/common.hpp"

namespace commlab {

// Finite positive measure: point atoms (location, weight) plus an optional
// nonnegative density sampled on a uniform grid.
struct AtomicMeasure {
    struct Density {
        double x0 = 0.0;
        double dx = 0.0;
        std::vector<double> values;
    };

    std::vector<std::pair<double, double>> atoms;
    std::optional<Density> density;

    void validate() const {
        for (const auto& [t, w] : atoms) {
            if (!(w > 0.0)) throw std::invalid_argument("AtomicMeasure: atom weights must be positive");
            if (!std::isfinite(t) || !std::isfinite(w))
                throw std::invalid_argument("AtomicMeasure: atom entries must be finite");
        }
        if (density) {
            if (!(density->dx > 0.0)) throw std::invalid_argument("AtomicMeasure: density needs dx > 0");
            if (density->values.size() < 2)
                throw std::invalid_argument("AtomicMeasure: density needs at least two samples");
            for (double v : density->values) {
                if (!(v >= 0.0)) throw std::invalid_argument("AtomicMeasure: density must be nonnegative");
            }
        }
        if (atoms.empty() && !density) throw std::invalid_argument("AtomicMeasure: measure is empty");
    }

    // Trapezoid integral of q(t) against the density part.
    template <class Q>
    double density_integral(Q&& q) const {
        if (!density) return 0.0;
        const auto& d = *density;
        double acc = 0.0;
        const std::size_t n = d.values.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double weight = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
            acc += weight * d.values[i] * q(d.x0 + static_cast<double>(i) * d.dx);
        }
        return acc * d.dx;
    }

    double total_mass() const {
        double m = 0.0;
        for (const auto& [t, w] : atoms) m += w;
        m += density_integral([](double) { return 1.0; });
        return m;
    }

    double mean() const {
        double s = 0.0;
        for (const auto& [t, w] : atoms) s += w * t;
        s += density_integral([](double t) { return t; });
        return s / total_mass();
    }

    // Variance of the probability measure nu / |nu|.
    double variance() const {
        const double mass = total_mass();
        const double mu = mean();
        double s = 0.0;
        for (const auto& [t, w] : atoms) s += w * (t - mu) * (t - mu);
        s += density_integral([mu](double t) { return (t - mu) * (t - mu); });
        return s / mass;
    }
};

// A member of the strip class of half-width a, kept as (a, c, measure).
struct KatoFunction {
    double a = 1.0;
    double c = 0.0;
    AtomicMeasure measure;

    KatoFunction() = default;
    KatoFunction(double a_, double c_, AtomicMeasure m) : a(a_), c(c_), measure(std::move(m)) {
        if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("KatoFunction: need a > 0");
        if (!std::isfinite(c)) throw std::invalid_argument("KatoFunction: offset must be finite");
        measure.validate();
    }

    // Slope parameter of the tanh profile; recomputed, never cached.
    double slope() const { return pi / (2.0 * a); }

    double mass() const { return measure.total_mass(); }

    // Range endpoints f(-inf) and f(+inf).
    double limit_left() const { return c - mass(); }
    double limit_right() const { return c + mass(); }
};

// Single tanh step of unit mass centered at t = center, class half-width a.
inline KatoFunction single_step(double a, double center = 0.0, double weight = 1.0, double c = 0.0) {
    AtomicMeasure m;
    m.atoms.push_back({center, weight});
    return KatoFunction(a, c, std::move(m));
}

inline double kato_eval(const KatoFunction& f, double x) {
    const double s = f.slope();
    double acc = f.c;
    for (const auto& [t, w] : f.measure.atoms) acc += w * std::tanh(s * (x - t));
    acc += f.measure.density_integral([&](double t) { return std::tanh(s * (x - t)); });
    return acc;
}

inline double kato_derivative(const KatoFunction& f, double x) {
    const double s = f.slope();
    double acc = 0.0;
    for (const auto& [t, w] : f.measure.atoms) {
        const double sh = sech(s * (x - t));
        acc += w * s * sh * sh;
    }
    acc += f.measure.density_integral([&](double t) {
        const double sh = sech(s * (x - t));
        return s * sh * sh;
    });
    return acc;
}

inline double kato_second_derivative(const KatoFunction& f, double x) {
    const double s = f.slope();
    double acc = 0.0;
    auto term = [s](double u) {
        const double sh = sech(u);
        return -2.0 * s * s * sh * sh * std::tanh(u);
    };
    for (const auto& [t, w] : f.measure.atoms) acc += w * term(s * (x - t));
    acc += f.measure.density_integral([&](double t) { return term(s * (x - t)); });
    return acc;
}

// f(+inf) - f(-inf) = 2 |nu|; the bracket that scales every trace formula.
inline double total_variation(const KatoFunction& f) { return 2.0 * f.mass(); }

// s / (cosh(D) + c) without overflowing cosh.
inline double bounded_cosh_ratio(double s, double D, double c) {
    const double aD = std::abs(D);
    if (aD < 700.0) return s / (std::cosh(D) + c);
    const double e = std::exp(-aD);
    return 2.0 * s * e / (1.0 + e * e + 2.0 * c * e);
}

// Imaginary part of the analytic continuation, Im f(x + iy).
// For one atom: w sin(2 a_hat y) / (cosh(2 a_hat (x-t)) + cos(2 a_hat y)),
// which is nonnegative for 0 <= y < a and blows up as y -> a at the atom.
// Heights with |y| > 0.999 a are rejected as numerically unsafe.
inline double im_continuation(const KatoFunction& f, double x, double y) {
    if (std::abs(y) > 0.999 * f.a)
        throw std::domain_error("im_continuation: height too close to the strip boundary");
    const double s = f.slope();
    const double sn = std::sin(2.0 * s * y);
    const double cs = std::cos(2.0 * s * y);
    double acc = 0.0;
    for (const auto& [t, w] : f.measure.atoms) acc += w * bounded_cosh_ratio(sn, 2.0 * s * (x - t), cs);
    acc += f.measure.density_integral([&](double t) { return bounded_cosh_ratio(sn, 2.0 * s * (x - t), cs); });
    return acc;
}

// Boundary-trace recovery of the representing measure.
//
// Evaluating Im g at height y inside the strip gives the density of the
// width-y representation of the same function:
//
//     rho_y(t) = Im g(t + iy) / (2 y),
//
// exactly, with total mass preserved. The rebuilt function therefore uses
// class half-width y (the height itself), and the calibration constant in
// the (2 pi)^{-1} kappa parameterization is kappa = pi / y.
struct MeasureRecovery {
    AtomicMeasure measure;  // density-only measure on the requested grid
    double width = 0.0;     // class half-width of the recovered representation
    double mass_ratio = 0.0; // recovered mass / original mass
};

inline MeasureRecovery recover_measure(const KatoFunction& g, double y, double x0, double dx, int n) {
    if (!(y > 0.0) || y > 0.999 * g.a)
        throw std::domain_error("recover_measure: height must satisfy 0 < y < a");
    if (!(dx > 0.0) || n < 2) throw std::invalid_argument("recover_measure: bad grid");
    MeasureRecovery out;
    AtomicMeasure::Density d;
    d.x0 = x0;
    d.dx = dx;
    d.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double v = im_continuation(g, x0 + i * dx, y) / (2.0 * y);
        d.values[static_cast<std::size_t>(i)] = std::max(v, 0.0);
    }
    out.measure.density = std::move(d);
    out.measure.validate();
    out.width = y;
    out.mass_ratio = g.mass() > 0.0 ? out.measure.total_mass() / g.mass() : 0.0;
    return out;
}

// Width functional sigma^2 = a_hat^2 / 3 + Var(nu): one tanh step of slope
// a_hat contributes pi^2 / (12 a^2) = a_hat^2 / 3, and spreading the measure
// adds the variance of the normalized atom/density locations on top.
inline double variance_functional(const KatoFunction& f) {
    if (!(f.mass() > 0.0)) throw std::domain_error("variance_functional: needs positive total mass");
    const double s = f.slope();
    return s * s / 3.0 + f.measure.variance();
}

// Uniformly sampled bounded function with declared limits at the two ends of
// the line. The optional derivative channel carries analytically known
// derivative samples; consumers fall back to centered differences without it.
struct SampledFunction {
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> values;
    std::optional<std::vector<double>> derivative;
    double limit_left = 0.0;
    double limit_right = 0.0;
    double sup_bound = 0.0;
    bool monotone = false;

    std::size_t size() const { return values.size(); }
    double x(std::size_t j) const { return x0 + static_cast<double>(j) * dx; }

    void validate() const {
        if (!(dx > 0.0)) throw std::invalid_argument("SampledFunction: need dx > 0");
        if (values.size() < 2) throw std::invalid_argument("SampledFunction: need at least two samples");
        if (derivative && derivative->size() != values.size())
            throw std::invalid_argument("SampledFunction: derivative length mismatch");
    }

    // Sample with constant extension by the declared limits outside the grid.
    double extended(std::ptrdiff_t j) const {
        if (j < 0) return limit_left;
        if (j >= static_cast<std::ptrdiff_t>(values.size())) return limit_right;
        return values[static_cast<std::size_t>(j)];
    }

    double range_span() const { return limit_right - limit_left; }

    void refresh_sup() {
        double s = std::max(std::abs(limit_left), std::abs(limit_right));
        for (double v : values) s = std::max(s, std::abs(v));
        sup_bound = s;
    }
};

inline SampledFunction sample(const KatoFunction& f, double x0, double dx, int n) {
    if (!(dx > 0.0) || n < 2) throw std::invalid_argument("sample: bad grid");
    SampledFunction s;
    s.x0 = x0;
    s.dx = dx;
    s.values.resize(static_cast<std::size_t>(n));
    s.derivative.emplace(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double x = x0 + j * dx;
        s.values[static_cast<std::size_t>(j)] = kato_eval(f, x);
        (*s.derivative)[static_cast<std::size_t>(j)] = kato_derivative(f, x);
    }
    s.limit_left = f.limit_left();
    s.limit_right = f.limit_right();
    s.monotone = true;
    s.refresh_sup();
    return s;
}

// Gaussian mollification on the sampling grid. The discrete kernel is
// renormalized to unit mass, so constants pass through exactly, and the
// derivative channel is filled from the analytically differentiated kernel.
// Values outside the grid are the declared boundary limits.
inline SampledFunction mollify(const SampledFunction& in, double sigma) {
    in.validate();
    if (!(sigma > 0.0)) throw std::invalid_argument("mollify: need sigma > 0");
    if (!(in.dx < sigma / 4.0))
        throw std::domain_error("mollify: grid spacing must be finer than sigma / 4");

    const std::ptrdiff_t radius = static_cast<std::ptrdiff_t>(std::ceil(9.0 * sigma / in.dx));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double mass = 0.0;
    for (std::ptrdiff_t m = -radius; m <= radius; ++m) {
        const double u = static_cast<double>(m) * in.dx;
        const double k = std::exp(-u * u / (2.0 * sigma * sigma));
        kernel[static_cast<std::size_t>(m + radius)] = k;
        mass += k;
    }
    for (double& k : kernel) k /= mass;

    SampledFunction out = in;
    out.derivative.emplace(in.values.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.values.size());
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        double v = 0.0, d = 0.0;
        for (std::ptrdiff_t m = -radius; m <= radius; ++m) {
            const double k = kernel[static_cast<std::size_t>(m + radius)];
            const double sample_v = in.extended(j - m);
            v += k * sample_v;
            d += (-(static_cast<double>(m) * in.dx) / (sigma * sigma)) * k * sample_v;
        }
        out.values[static_cast<std::size_t>(j)] = v;
        (*out.derivative)[static_cast<std::size_t>(j)] = d;
    }
    out.monotone = in.monotone;
    out.refresh_sup();
    return out;
}

} // namespace commlab
