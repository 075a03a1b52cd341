#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "radgas/errors.hpp"

// Uniform truncation of the real line plus the discrete calculus every
// diagnostic is built from: trapezoid quadrature, second-order derivatives,
// norms and extrema.  Quadrature is deliberately trapezoid (not Simpson) to
// match the order of the spatial stencils.

namespace radgas {

using Field = std::vector<double>;

struct Grid {
    double L = 10.0;    // half-length of the truncated domain [-L, L]
    std::size_t N = 201;
    double dx = 0.1;
    Field x;            // nodes -L + i dx, strictly increasing, symmetric

    Grid() : Grid(10.0, 201) {}

    Grid(double half_length, std::size_t nodes) : L(half_length), N(nodes) {
        if (!(L > 0.0)) throw DomainError("Grid: L must be > 0");
        if (N < 8) throw DomainError("Grid: N must be >= 8");
        dx = 2.0 * L / static_cast<double>(N - 1);
        x.resize(N);
        for (std::size_t i = 0; i < N; ++i)
            x[i] = -L + static_cast<double>(i) * dx;
    }
};

namespace detail {

inline void check_aligned(const Field& f, const Grid& g, const char* where) {
    if (f.size() != g.N)
        throw ShapeError(std::string(where) + ": field size " + std::to_string(f.size()) +
                         " does not match grid N=" + std::to_string(g.N));
}

} // namespace detail

// =============================================================================
// Quadrature
// =============================================================================

/// Composite trapezoid rule over [-L, L].
inline double integrate(const Field& f, const Grid& g) {
    detail::check_aligned(f, g, "integrate");
    double sum = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < g.N; ++i) sum += f[i];
    return sum * g.dx;
}

/// Trapezoid integral over an arbitrary sub-interval [a, b] of the domain,
/// with linear interpolation of f at endpoints that fall between nodes.
inline double interval_integral(const Field& f, const Grid& g, double a, double b) {
    detail::check_aligned(f, g, "interval_integral");
    if (a > b) std::swap(a, b);
    if (a < g.x.front() - 1e-12 * g.L || b > g.x.back() + 1e-12 * g.L)
        throw DomainError("interval_integral: [" + std::to_string(a) + ", " + std::to_string(b) +
                          "] exceeds domain [-L, L] with L=" + std::to_string(g.L));
    a = std::max(a, g.x.front());
    b = std::min(b, g.x.back());
    auto value_at = [&](double xq, std::size_t cell) {
        double w = (xq - g.x[cell]) / g.dx;
        return (1.0 - w) * f[cell] + w * f[cell + 1];
    };
    auto cell_of = [&](double xq) {
        auto c = static_cast<std::size_t>(std::floor((xq - g.x.front()) / g.dx));
        return std::min(c, g.N - 2);
    };
    std::size_t ca = cell_of(a);
    std::size_t cb = cell_of(b);
    double fa = value_at(a, ca);
    double fb = value_at(b, cb);
    if (ca == cb)
        return 0.5 * (fa + fb) * (b - a);
    // partial first cell, whole interior cells, partial last cell
    double sum = 0.5 * (fa + f[ca + 1]) * (g.x[ca + 1] - a);
    for (std::size_t i = ca + 1; i < cb; ++i)
        sum += 0.5 * (f[i] + f[i + 1]) * g.dx;
    sum += 0.5 * (f[cb] + fb) * (b - g.x[cb]);
    return sum;
}

/// Integral over the window [-k-1, k+1] centered at the origin.
inline double window_integral(const Field& f, const Grid& g, unsigned k) {
    double half = static_cast<double>(k) + 1.0;
    if (half > g.L + 1e-12 * g.L)
        throw DomainError("window_integral: window half-length " + std::to_string(half) +
                          " exceeds L=" + std::to_string(g.L));
    return interval_integral(f, g, -half, half);
}

// =============================================================================
// Derivatives
// =============================================================================

/// Second-order first derivative: central in the interior, one-sided
/// three-point at the two boundary nodes (exact for quadratics everywhere).
inline Field ddx(const Field& f, const Grid& g) {
    detail::check_aligned(f, g, "ddx");
    if (g.N < 3) throw ShapeError("ddx: need N >= 3");
    Field out(g.N);
    double inv2dx = 1.0 / (2.0 * g.dx);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2dx;
    for (std::size_t i = 1; i + 1 < g.N; ++i)
        out[i] = (f[i + 1] - f[i - 1]) * inv2dx;
    out[g.N - 1] = (3.0 * f[g.N - 1] - 4.0 * f[g.N - 2] + f[g.N - 3]) * inv2dx;
    return out;
}

/// Second derivative: compact three-point stencil in the interior,
/// second-order four-point one-sided at the boundaries.
inline Field d2dx(const Field& f, const Grid& g) {
    detail::check_aligned(f, g, "d2dx");
    if (g.N < 4) throw ShapeError("d2dx: need N >= 4");
    Field out(g.N);
    double invdx2 = 1.0 / (g.dx * g.dx);
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * invdx2;
    for (std::size_t i = 1; i + 1 < g.N; ++i)
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * invdx2;
    std::size_t n = g.N - 1;
    out[n] = (2.0 * f[n] - 5.0 * f[n - 1] + 4.0 * f[n - 2] - f[n - 3]) * invdx2;
    return out;
}

// =============================================================================
// Norms and extrema
// =============================================================================

struct Norms {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double h1 = 0.0;  // H1 seminorm: L2 norm of ddx(f)
};

inline Norms norms(const Field& f, const Grid& g) {
    detail::check_aligned(f, g, "norms");
    Field absf(g.N), sqf(g.N);
    double linf = 0.0;
    for (std::size_t i = 0; i < g.N; ++i) {
        absf[i] = std::abs(f[i]);
        sqf[i] = f[i] * f[i];
        linf = std::max(linf, absf[i]);
    }
    Norms n;
    n.l1 = integrate(absf, g);
    n.l2 = std::sqrt(std::max(0.0, integrate(sqf, g)));
    n.linf = linf;
    Field df = ddx(f, g);
    for (std::size_t i = 0; i < g.N; ++i) df[i] *= df[i];
    n.h1 = std::sqrt(std::max(0.0, integrate(df, g)));
    return n;
}

struct Extrema {
    double min = 0.0;
    std::size_t argmin = 0;
    double max = 0.0;
    std::size_t argmax = 0;
};

/// Exact discrete extrema; ties broken by the lowest index.
inline Extrema extrema(const Field& f) {
    if (f.empty()) throw ShapeError("extrema: empty field");
    Extrema e{f[0], 0, f[0], 0};
    for (std::size_t i = 1; i < f.size(); ++i) {
        if (f[i] < e.min) { e.min = f[i]; e.argmin = i; }
        if (f[i] > e.max) { e.max = f[i]; e.argmax = i; }
    }
    return e;
}

} // namespace radgas
