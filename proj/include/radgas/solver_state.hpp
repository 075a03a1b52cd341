#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "radgas/errors.hpp"
#include "radgas/grid.hpp"

namespace radgas {

/// Truncation of the Cauchy problem: either clamp the boundary nodes to the
/// far-field state (1, 0, 1, 0), or model insulated walls (u = 0, zero flux
/// for theta and z via reflected ghosts).
enum class BoundaryMode { FarField, InsulatedWall };

/// Grid samples of the primary variables at one time.
struct State {
    double t = 0.0;
    Field v;
    Field u;
    Field theta;
    Field z;

    std::size_t size() const { return v.size(); }
};

/// Time derivatives of a State, aligned with its grid.
struct Tendency {
    Field dv;
    Field du;
    Field dtheta;
    Field dz;
};

// Round-off slack allowed on the reactant bounds 0 <= z <= 1.
inline constexpr double kZSlack = 1e-10;

/// Enforces the State invariants: positivity of v and theta, z within
/// [-1e-10, 1+1e-10], all entries finite.  Throws naming the first
/// offending node.
inline void check_state(const State& s, const Grid& g) {
    detail::check_aligned(s.v, g, "state.v");
    detail::check_aligned(s.u, g, "state.u");
    detail::check_aligned(s.theta, g, "state.theta");
    detail::check_aligned(s.z, g, "state.z");
    for (std::size_t i = 0; i < g.N; ++i) {
        if (!(s.v[i] > 0.0) || !std::isfinite(s.v[i]))
            throw BlowUpError("state invariant: v=" + std::to_string(s.v[i]) +
                              " at node " + std::to_string(i) + ", t=" + std::to_string(s.t),
                              s.t, i);
        if (!(s.theta[i] > 0.0) || !std::isfinite(s.theta[i]))
            throw BlowUpError("state invariant: theta=" + std::to_string(s.theta[i]) +
                              " at node " + std::to_string(i) + ", t=" + std::to_string(s.t),
                              s.t, i);
        if (!(s.z[i] >= -kZSlack) || !(s.z[i] <= 1.0 + kZSlack) || !std::isfinite(s.z[i]))
            throw BlowUpError("state invariant: z=" + std::to_string(s.z[i]) +
                              " at node " + std::to_string(i) + ", t=" + std::to_string(s.t),
                              s.t, i);
        if (!std::isfinite(s.u[i]))
            throw BlowUpError("state invariant: u is not finite at node " + std::to_string(i) +
                              ", t=" + std::to_string(s.t), s.t, i);
    }
}

} // namespace radgas
