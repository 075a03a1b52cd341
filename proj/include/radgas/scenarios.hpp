#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "radgas/grid.hpp"
#include "radgas/model.hpp"
#include "radgas/solver_state.hpp"

// Initial-data construction.  Every scenario produces an H1 perturbation of
// the far-field state (1, 0, 1, 0) whose support ends inside the inner 80%
// of the domain, so the outer 10% carries far-field values identically and
// the Dirichlet truncation at +-L is consistent with the data.

namespace radgas {

enum class ScenarioKind { Equilibrium, Gaussian, Multibump, SeededRandom };

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Equilibrium;
    double dv = 0.0;      // amplitude of the v perturbation
    double du = 0.0;      // amplitude of the u perturbation
    double dtheta = 0.0;  // amplitude of the theta perturbation
    double dz = 0.0;      // amplitude of the reactant bump
    double width = 2.0;   // bump core width (support radius is 4*width)
    std::vector<double> centers = {0.0};
    std::uint64_t seed = 0;
};

namespace detail {

// Gaussian-core bump with exact compact support on |x - c| < 4 w:
// exp(-s^2/2 / (1 - (s/4)^2)) with s = (x - c)/w.  C-infinity, peak 1.
inline double bump(double x, double c, double w) {
    double s = (x - c) / w;
    double r = s / 4.0;
    double q = 1.0 - r * r;
    if (q <= 0.0) return 0.0;
    return std::exp(-0.5 * s * s / q);
}

// Derivative-shaped (dipole) profile normalized to peak magnitude ~1;
// positive amplitude means outward motion, matching an expanding hot bump.
inline double bump_dipole(double x, double c, double w) {
    double s = (x - c) / w;
    return s * std::exp(0.5) * bump(x, c, w);
}

// C2 window equal to 1 on |x| <= 0.7 L, falling smoothly to 0 at |x| = 0.8 L.
inline double support_window(double x, double L) {
    double s = (0.8 * L - std::abs(x)) / (0.1 * L);
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

// Uniform double in [0, 1) from raw engine output; the standard library
// distributions are implementation-defined, this is reproducible everywhere.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Band-limited random profile with |f| <= 1, supported on the inner 80%.
inline Field random_profile(const Grid& g, std::mt19937_64& rng) {
    constexpr int modes = 8;
    double amp[modes], phase[modes], norm = 0.0;
    for (int m = 0; m < modes; ++m) {
        amp[m] = (2.0 * uniform01(rng) - 1.0) / static_cast<double>(m + 1);
        phase[m] = 2.0 * std::numbers::pi * uniform01(rng);
        norm += std::abs(amp[m]);
    }
    Field f(g.N, 0.0);
    for (std::size_t i = 0; i < g.N; ++i) {
        double acc = 0.0;
        for (int m = 0; m < modes; ++m)
            acc += amp[m] * std::cos((m + 1) * std::numbers::pi * g.x[i] / g.L + phase[m]);
        f[i] = acc / norm * support_window(g.x[i], g.L);
    }
    return f;
}

} // namespace detail

/// Builds the initial state for a scenario.  Rejects data violating the
/// positivity floor (v, theta >= 0.05) or the compact-support rule.
inline State build(const ScenarioSpec& spec, const Grid& g, const Parameters& par) {
    State s;
    s.t = 0.0;
    s.v.assign(g.N, 1.0);
    s.u.assign(g.N, 0.0);
    s.theta.assign(g.N, 1.0);
    s.z.assign(g.N, 0.0);

    auto add_bumps = [&](const std::vector<double>& centers) {
        for (double c : centers) {
            if (std::abs(c) + 4.0 * spec.width > 0.8 * g.L)
                throw DomainError("scenario: bump at center " + std::to_string(c) +
                                  " with support radius " + std::to_string(4.0 * spec.width) +
                                  " leaves the inner 80% of the domain (L=" +
                                  std::to_string(g.L) + ")");
            for (std::size_t i = 0; i < g.N; ++i) {
                double G = detail::bump(g.x[i], c, spec.width);
                s.v[i] += spec.dv * G;
                s.theta[i] += spec.dtheta * G;
                s.u[i] += spec.du * detail::bump_dipole(g.x[i], c, spec.width);
                s.z[i] += spec.dz * G;
            }
        }
    };

    switch (spec.kind) {
    case ScenarioKind::Equilibrium:
        break;
    case ScenarioKind::Gaussian:
        add_bumps({spec.centers.empty() ? 0.0 : spec.centers.front()});
        break;
    case ScenarioKind::Multibump: {
        std::vector<double> centers = spec.centers;
        if (centers.size() != 3)
            centers = {-0.4 * g.L, 0.0, 0.4 * g.L};
        add_bumps(centers);
        break;
    }
    case ScenarioKind::SeededRandom: {
        std::mt19937_64 rng(spec.seed);
        Field fv = detail::random_profile(g, rng);
        Field fu = detail::random_profile(g, rng);
        Field ft = detail::random_profile(g, rng);
        Field fz = detail::random_profile(g, rng);
        for (std::size_t i = 0; i < g.N; ++i) {
            s.v[i] += spec.dv * fv[i];
            s.u[i] += spec.du * fu[i];
            s.theta[i] += spec.dtheta * ft[i];
            s.z[i] += spec.dz * fz[i];
        }
        break;
    }
    }

    // reactant fraction is clipped into [0, 1] exactly
    for (double& zi : s.z) zi = std::clamp(zi, 0.0, 1.0);

    for (std::size_t i = 0; i < g.N; ++i) {
        if (s.v[i] < 0.05)
            throw DomainError("scenario: v0 drops to " + std::to_string(s.v[i]) +
                              " at node " + std::to_string(i) + " (floor 0.05)");
        if (s.theta[i] < 0.05)
            throw DomainError("scenario: theta0 drops to " + std::to_string(s.theta[i]) +
                              " at node " + std::to_string(i) + " (floor 0.05)");
    }
    (void)par;
    return s;
}

} // namespace radgas
