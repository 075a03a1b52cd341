#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "radgas/config.hpp"
#include "radgas/diagnostics.hpp"
#include "radgas/grid.hpp"
#include "radgas/model.hpp"
#include "radgas/scenarios.hpp"
#include "radgas/solver_state.hpp"

// Semi-discrete right-hand side of the Lagrangian system
//   v_t = u_x
//   u_t = sigma_x,                  sigma = -p + mu u_x / v
//   e_th th_t = -th p_th u_x + mu u_x^2 / v + (kappa th_x / v)_x + lambda phi z
//   z_t = (d z_x / v^2)_x - phi z
// with conservative flux differences, arithmetic half-node averages of 1/v,
// kappa/v and 1/v^2, and explicit (Heun) or operator-split IMEX stepping.
// Positivity is enforced by detection and abort, never by clamping.

namespace radgas {

// =============================================================================
// Right-hand side
// =============================================================================

namespace detail {

/// Right-hand side without the state validation; callers guarantee a valid
/// state (the steppers validate after every stage anyway).
inline Tendency rhs_unchecked(const State& s, const Grid& g, const Parameters& par,
                              BoundaryMode bc) {
    const std::size_t N = g.N;
    const double dx = g.dx;
    const double inv_dx = 1.0 / dx;
    const double rad_sign = detail::radiation_pressure_sign();
    const double third_a = rad_sign * par.a / 3.0;

    // pointwise coefficients
    Field p(N), w(N), r2(N), phi(N), e_th(N), th_pth(N);
    for (std::size_t i = 0; i < N; ++i) {
        double v = s.v[i], th = s.theta[i];
        double t3 = th * th * th;
        p[i] = par.R * th / v + third_a * t3 * th;
        w[i] = (par.kappa1 + par.kappa2 * v * detail::pow_fast(th, par.b)) / v;
        r2[i] = 1.0 / (v * v);
        phi[i] = (par.beta == 0.0 ? par.Krate : par.Krate * detail::pow_fast(th, par.beta)) *
                 std::exp(-par.A / th);
        e_th[i] = par.Cv + 4.0 * par.a * v * t3;
        th_pth[i] = th * (par.R / v + (4.0 / 3.0) * par.a * t3);
    }

    // half-node fluxes (index e lives between nodes e and e+1)
    Field f_u(N - 1), f_th(N - 1), f_z(N - 1);
    for (std::size_t e = 0; e + 1 < N; ++e) {
        double inv_v = 0.5 * (1.0 / s.v[e] + 1.0 / s.v[e + 1]);
        f_u[e] = -0.5 * (p[e] + p[e + 1]) + par.mu * inv_v * (s.u[e + 1] - s.u[e]) * inv_dx;
        f_th[e] = 0.5 * (w[e] + w[e + 1]) * (s.theta[e + 1] - s.theta[e]) * inv_dx;
        f_z[e] = par.d * 0.5 * (r2[e] + r2[e + 1]) * (s.z[e + 1] - s.z[e]) * inv_dx;
    }

    Tendency rhs;
    rhs.dv.assign(N, 0.0);
    rhs.du.assign(N, 0.0);
    rhs.dtheta.assign(N, 0.0);
    rhs.dz.assign(N, 0.0);

    for (std::size_t i = 1; i + 1 < N; ++i) {
        double u_x = 0.5 * (s.u[i + 1] - s.u[i - 1]) * inv_dx;
        double heat = par.mu * u_x * u_x / s.v[i];
        rhs.dv[i] = u_x;
        rhs.du[i] = (f_u[i] - f_u[i - 1]) * inv_dx;
        rhs.dtheta[i] = (-th_pth[i] * u_x + heat + (f_th[i] - f_th[i - 1]) * inv_dx +
                         par.lambda * phi[i] * s.z[i]) / e_th[i];
        rhs.dz[i] = (f_z[i] - f_z[i - 1]) * inv_dx - phi[i] * s.z[i];
    }

    if (bc == BoundaryMode::FarField) {
        // clamped boundary nodes carry zero tendency
        rhs.dv[0] = rhs.du[0] = rhs.dtheta[0] = rhs.dz[0] = 0.0;
        rhs.dv[N - 1] = rhs.du[N - 1] = rhs.dtheta[N - 1] = rhs.dz[N - 1] = 0.0;
    } else {
        // insulated walls: u = 0 (Dirichlet); zero-flux theta and z via
        // reflected ghosts (v, theta, z even across the wall, u odd), so the
        // ghost flux is minus the first interior flux
        {
            double u_x = s.u[1] * inv_dx;
            rhs.dv[0] = u_x;
            rhs.du[0] = 0.0;
            rhs.dtheta[0] = (-th_pth[0] * u_x + par.mu * u_x * u_x / s.v[0] +
                             2.0 * f_th[0] * inv_dx + par.lambda * phi[0] * s.z[0]) / e_th[0];
            rhs.dz[0] = 2.0 * f_z[0] * inv_dx - phi[0] * s.z[0];
        }
        {
            std::size_t i = N - 1;
            double u_x = -s.u[N - 2] * inv_dx;
            rhs.dv[i] = u_x;
            rhs.du[i] = 0.0;
            rhs.dtheta[i] = (-th_pth[i] * u_x + par.mu * u_x * u_x / s.v[i] -
                             2.0 * f_th[N - 2] * inv_dx + par.lambda * phi[i] * s.z[i]) / e_th[i];
            rhs.dz[i] = -2.0 * f_z[N - 2] * inv_dx - phi[i] * s.z[i];
        }
    }
    return rhs;
}

} // namespace detail

inline Tendency compute_rhs(const State& s, const Grid& g, const Parameters& par,
                            BoundaryMode bc) {
    check_state(s, g);
    return detail::rhs_unchecked(s, g, par, bc);
}

// =============================================================================
// Time-step control
// =============================================================================

/// Largest stable explicit step:
///   dt = cfl * min_i { dx^2/(2 D_i), dx/c_i, 1/(2 phi_i + eps) },
/// where D_i = max(mu/v, kappa/(v e_th), d/v^2) bounds the diffusion rates
/// and c_i = sqrt(th p_th^2/e_th - p_v) is the Lagrangian adiabatic
/// characteristic speed.
inline double stable_dt(const State& s, const Grid& g, const Parameters& par, double cfl) {
    check_state(s, g);
    constexpr double eps0 = 1e-30;
    double diff_max = 0.0, c2_max = 0.0, th_max = 0.0;
    for (std::size_t i = 0; i < g.N; ++i) {
        double v = s.v[i], th = s.theta[i];
        double t3 = th * th * th;
        double e_th = par.Cv + 4.0 * par.a * v * t3;
        double p_th = par.R / v + (4.0 / 3.0) * par.a * t3;
        double p_v = -par.R * th / (v * v);
        double kap = par.kappa1 + par.kappa2 * v * detail::pow_fast(th, par.b);
        diff_max = std::max({diff_max, par.mu / v, kap / (v * e_th), par.d / (v * v)});
        c2_max = std::max(c2_max, th * p_th * p_th / e_th - p_v);
        th_max = std::max(th_max, th);
    }
    // the Arrhenius rate is monotone in theta for beta >= 0, so the reaction
    // cap is set by the hottest node alone
    double phi_max = reaction_rate(th_max, par);
    double dt = std::min({g.dx * g.dx / (2.0 * diff_max), g.dx / std::sqrt(c2_max),
                          1.0 / (2.0 * phi_max + eps0)});
    return cfl * dt;
}

// =============================================================================
// Stepping
// =============================================================================

namespace detail {

inline void apply_bc(State& s, BoundaryMode bc) {
    std::size_t n = s.size() - 1;
    if (bc == BoundaryMode::FarField) {
        s.v[0] = 1.0; s.u[0] = 0.0; s.theta[0] = 1.0; s.z[0] = 0.0;
        s.v[n] = 1.0; s.u[n] = 0.0; s.theta[n] = 1.0; s.z[n] = 0.0;
    } else {
        s.u[0] = 0.0;
        s.u[n] = 0.0;
    }
}

inline void axpy_state(State& out, const State& base, const Tendency& k, double dt) {
    std::size_t N = base.size();
    for (std::size_t i = 0; i < N; ++i) {
        out.v[i] = base.v[i] + dt * k.dv[i];
        out.u[i] = base.u[i] + dt * k.du[i];
        out.theta[i] = base.theta[i] + dt * k.dtheta[i];
        out.z[i] = base.z[i] + dt * k.dz[i];
    }
}

} // namespace detail

/// One explicit Heun (two-stage, second-order) step of size dt.  Boundary
/// conditions are re-applied after each stage; positivity loss or NaN raises
/// a BlowUpError carrying the failure time and node.
inline State step(const State& s, const Grid& g, const Parameters& par, BoundaryMode bc,
                  double dt) {
    Tendency k1 = detail::rhs_unchecked(s, g, par, bc);
    State s1 = s;
    s1.t = s.t + dt;
    detail::axpy_state(s1, s, k1, dt);
    detail::apply_bc(s1, bc);
    check_state(s1, g);

    Tendency k2 = detail::rhs_unchecked(s1, g, par, bc);
    State out = s;
    out.t = s.t + dt;
    for (std::size_t i = 0; i < g.N; ++i) {
        out.v[i] = s.v[i] + 0.5 * dt * (k1.dv[i] + k2.dv[i]);
        out.u[i] = s.u[i] + 0.5 * dt * (k1.du[i] + k2.du[i]);
        out.theta[i] = s.theta[i] + 0.5 * dt * (k1.dtheta[i] + k2.dtheta[i]);
        out.z[i] = s.z[i] + 0.5 * dt * (k1.dz[i] + k2.dz[i]);
    }
    detail::apply_bc(out, bc);
    check_state(out, g);
    return out;
}

namespace detail {

/// Thomas solve of a tridiagonal system (lower, diag, upper, rhs in place).
inline void solve_tridiag(std::vector<double>& lo, std::vector<double>& di,
                          std::vector<double>& up, std::vector<double>& rhs) {
    std::size_t n = di.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (di[i - 1] == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
        double m = lo[i] / di[i - 1];
        di[i] -= m * up[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (di[n - 1] == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
    rhs[n - 1] /= di[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

/// Backward-Euler solve of f_t = (c f_x)_x / m with coefficients frozen:
/// c at half nodes, m at nodes.  Dirichlet rows for FarField boundaries,
/// mirrored zero-flux rows for insulated walls.
inline void implicit_diffusion(Field& f, const Field& c_half, const Field& m_node,
                               const Grid& g, BoundaryMode bc, double dt, double dirichlet_value) {
    std::size_t N = g.N;
    double r = dt / (g.dx * g.dx);
    std::vector<double> lo(N, 0.0), di(N, 1.0), up(N, 0.0), rhs(f.begin(), f.end());
    for (std::size_t i = 1; i + 1 < N; ++i) {
        double cl = c_half[i - 1] / m_node[i];
        double cr = c_half[i] / m_node[i];
        lo[i] = -r * cl;
        di[i] = 1.0 + r * (cl + cr);
        up[i] = -r * cr;
    }
    if (bc == BoundaryMode::FarField) {
        di[0] = 1.0; up[0] = 0.0; rhs[0] = dirichlet_value;
        di[N - 1] = 1.0; lo[N - 1] = 0.0; rhs[N - 1] = dirichlet_value;
    } else {
        double cr = c_half[0] / m_node[0];
        di[0] = 1.0 + 2.0 * r * cr;
        up[0] = -2.0 * r * cr;
        double cl = c_half[N - 2] / m_node[N - 1];
        di[N - 1] = 1.0 + 2.0 * r * cl;
        lo[N - 1] = -2.0 * r * cl;
    }
    solve_tridiag(lo, di, up, rhs);
    f.assign(rhs.begin(), rhs.end());
}

} // namespace detail

/// Operator-split step: explicit Heun on advection, reaction and viscous
/// work, then backward-Euler solves of the linearized theta and z diffusion
/// with coefficients frozen at the start of the implicit stage.  First-order
/// in time, unconditionally stable in the diffusion terms.
inline State step_imex(const State& s, const Grid& g, const Parameters& par, BoundaryMode bc,
                       double dt) {
    if (!(dt > 0.0)) throw DomainError("step_imex: dt must be > 0");
    check_state(s, g);
    const std::size_t N = g.N;

    // explicit part: full rhs minus the two diffusion fluxes
    auto explicit_rhs = [&](const State& st) {
        Tendency k = detail::rhs_unchecked(st, g, par, bc);
        Field wdiff(N), zdiff(N);
        {
            Field w(N), r2(N), e_th(N);
            for (std::size_t i = 0; i < N; ++i) {
                double v = st.v[i], th = st.theta[i];
                w[i] = (par.kappa1 + par.kappa2 * v * detail::pow_fast(th, par.b)) / v;
                r2[i] = 1.0 / (v * v);
                e_th[i] = par.Cv + 4.0 * par.a * v * th * th * th;
            }
            double inv_dx = 1.0 / g.dx;
            Field f_th(N - 1), f_z(N - 1);
            for (std::size_t e = 0; e + 1 < N; ++e) {
                f_th[e] = 0.5 * (w[e] + w[e + 1]) * (st.theta[e + 1] - st.theta[e]) * inv_dx;
                f_z[e] = par.d * 0.5 * (r2[e] + r2[e + 1]) * (st.z[e + 1] - st.z[e]) * inv_dx;
            }
            for (std::size_t i = 1; i + 1 < N; ++i) {
                wdiff[i] = (f_th[i] - f_th[i - 1]) * inv_dx / e_th[i];
                zdiff[i] = (f_z[i] - f_z[i - 1]) * inv_dx;
            }
            if (bc == BoundaryMode::InsulatedWall) {
                wdiff[0] = 2.0 * f_th[0] * inv_dx / e_th[0];
                zdiff[0] = 2.0 * f_z[0] * inv_dx;
                wdiff[N - 1] = -2.0 * f_th[N - 2] * inv_dx / e_th[N - 1];
                zdiff[N - 1] = -2.0 * f_z[N - 2] * inv_dx;
            } else {
                wdiff[0] = zdiff[0] = wdiff[N - 1] = zdiff[N - 1] = 0.0;
            }
        }
        for (std::size_t i = 0; i < N; ++i) {
            k.dtheta[i] -= wdiff[i];
            k.dz[i] -= zdiff[i];
        }
        return k;
    };

    Tendency k1 = explicit_rhs(s);
    State s1 = s;
    s1.t = s.t + dt;
    detail::axpy_state(s1, s, k1, dt);
    detail::apply_bc(s1, bc);
    check_state(s1, g);
    Tendency k2 = explicit_rhs(s1);
    State mid = s;
    mid.t = s.t + dt;
    for (std::size_t i = 0; i < N; ++i) {
        mid.v[i] = s.v[i] + 0.5 * dt * (k1.dv[i] + k2.dv[i]);
        mid.u[i] = s.u[i] + 0.5 * dt * (k1.du[i] + k2.du[i]);
        mid.theta[i] = s.theta[i] + 0.5 * dt * (k1.dtheta[i] + k2.dtheta[i]);
        mid.z[i] = s.z[i] + 0.5 * dt * (k1.dz[i] + k2.dz[i]);
    }
    detail::apply_bc(mid, bc);
    check_state(mid, g);

    // implicit diffusion, coefficients frozen at the stage-start state
    Field w_half(N - 1), z_half(N - 1), e_th(N), unit(N, 1.0);
    for (std::size_t i = 0; i < N; ++i)
        e_th[i] = par.Cv + 4.0 * par.a * mid.v[i] * mid.theta[i] * mid.theta[i] * mid.theta[i];
    for (std::size_t e = 0; e + 1 < N; ++e) {
        auto wfun = [&](std::size_t i) {
            return (par.kappa1 + par.kappa2 * mid.v[i] * detail::pow_fast(mid.theta[i], par.b)) /
                   mid.v[i];
        };
        w_half[e] = 0.5 * (wfun(e) + wfun(e + 1));
        z_half[e] = par.d * 0.5 * (1.0 / (mid.v[e] * mid.v[e]) + 1.0 / (mid.v[e + 1] * mid.v[e + 1]));
    }
    detail::implicit_diffusion(mid.theta, w_half, e_th, g, bc, dt, 1.0);
    detail::implicit_diffusion(mid.z, z_half, unit, g, bc, dt, 0.0);
    detail::apply_bc(mid, bc);
    check_state(mid, g);
    return mid;
}

// =============================================================================
// Record construction
// =============================================================================

/// Full diagnostics slice for one state.  Every field is a pure function of
/// (t, state); the time derivatives entering X and W come from the
/// semi-discrete right-hand side.
inline DiagnosticsRecord make_record(const State& s, const Grid& g, const Parameters& par,
                                     BoundaryMode bc) {
    DiagnosticsRecord r;
    r.t = s.t;
    const std::size_t N = g.N;

    Tendency k = compute_rhs(s, g, par, bc);
    Field u_x = ddx(s.u, g);
    Field th_x = ddx(s.theta, g);
    Field z_x = ddx(s.z, g);
    Field u_xx = d2dx(s.u, g);
    Field u_xt = ddx(k.du, g);

    Field f1(N), f2(N), f3(N), f4(N), f5(N), f6(N), f7(N), f8(N);
    for (std::size_t i = 0; i < N; ++i) {
        double v = s.v[i], th = s.theta[i], z = s.z[i];
        double kap = par.kappa1 + par.kappa2 * v * detail::pow_fast(th, par.b);
        double phi = reaction_rate(th, par);
        double visc = par.mu * u_x[i] * u_x[i] / (v * th);
        double cond = kap * th_x[i] * th_x[i] / (v * th * th);
        f1[i] = z;
        f2[i] = z * z;
        f3[i] = normalized_entropy(v, th, par) + 0.5 * s.u[i] * s.u[i];
        f4[i] = visc + cond;
        f5[i] = (1.0 + detail::pow_fast(th, par.b + 3.0)) * k.dtheta[i] * k.dtheta[i];
        f6[i] = (1.0 + detail::pow_fast(th, 2.0 * par.b)) * th_x[i] * th_x[i];
        f7[i] = phi * z;
        f8[i] = 2.0 * (par.d * z_x[i] * z_x[i] / (v * v) + phi * z * z);
        u_xx[i] *= u_xx[i];
        u_xt[i] *= u_xt[i];
    }
    r.reactant_mass = integrate(f1, g);
    r.reactant_l2 = integrate(f2, g);
    r.lyapunov = integrate(f3, g);
    r.V = integrate(f4, g);
    r.X = integrate(f5, g);
    r.Y = integrate(f6, g);
    r.Z = integrate(u_xx, g);
    r.W = integrate(u_xt, g);
    r.burn_rate = integrate(f7, g);
    r.l2_burn_rate = integrate(f8, g);
    r.source_rate = par.lambda * r.burn_rate;
    for (std::size_t i = 0; i < N; ++i)
        f4[i] += par.lambda * f7[i] / s.theta[i];
    r.diss_rate = integrate(f4, g);

    auto ev = extrema(s.v);
    auto et = extrema(s.theta);
    auto ez = extrema(s.z);
    r.vmin = ev.min; r.vmax = ev.max;
    r.thetamin = et.min; r.thetamax = et.max;
    r.zmin = ez.min; r.zmax = ez.max;

    Field pert(N);
    for (std::size_t i = 0; i < N; ++i) pert[i] = s.v[i] - 1.0;
    r.v_norms = norms(pert, g);
    r.u_norms = norms(s.u, g);
    for (std::size_t i = 0; i < N; ++i) pert[i] = s.theta[i] - 1.0;
    r.theta_norms = norms(pert, g);
    r.z_norms = norms(s.z, g);
    return r;
}

// =============================================================================
// Run driver
// =============================================================================

struct RunHooks {
    std::function<void(const DiagnosticsRecord&)> on_record;
    std::function<void(std::size_t index, const State&)> on_snapshot;
};

struct RunResult {
    State final_state;
    std::vector<DiagnosticsRecord> records;
};

namespace detail {

// Event times are always computed as index * interval from a global index,
// never by accumulating t += dt: a resumed run then lands on bit-identical
// times and states, which is what makes restart equivalence exact.

/// Smallest k with k * interval strictly beyond t.
inline std::size_t next_event_index(double t, double interval) {
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / interval)));
    while (static_cast<double>(k) * interval <= t) ++k;
    return k;
}

/// Index k if t equals k * interval bit-exactly (event times are always
/// formed by this same multiplication, so exact comparison is the point).
inline std::optional<std::size_t> aligned_event_index(double t, double interval) {
    double k = std::floor(t / interval + 0.5);
    if (k >= 0.0 && k * interval == t) return static_cast<std::size_t>(k);
    return std::nullopt;
}

} // namespace detail

/// Integrates a prepared state to t_end with adaptive dt = stable_dt(. , cfl),
/// clipped so steps land exactly on diagnostic, snapshot and final times.
/// Emits a record every diag_interval (including t = start) and a snapshot
/// every snap_interval.  Deterministic: identical inputs give bit-identical
/// records on one platform.
inline RunResult run_from_state(State s, const Grid& g, const Config& cfg, RunHooks hooks = {}) {
    const Parameters& par = cfg.params;
    check_state(s, g);

    RunResult out;
    auto emit_record = [&] {
        DiagnosticsRecord r = make_record(s, g, par, cfg.bc);
        out.records.push_back(r);
        if (hooks.on_record) hooks.on_record(r);
    };
    auto emit_snapshot = [&](std::size_t index) {
        if (hooks.on_snapshot) hooks.on_snapshot(index, s);
    };

    // the start time counts as a diagnostic event; a snapshot is emitted at
    // the start only when it falls on the absolute snapshot lattice, so a
    // resumed run continues the original file numbering
    emit_record();
    if (auto idx = detail::aligned_event_index(s.t, cfg.snap_interval))
        emit_snapshot(*idx);

    std::size_t diag_k = detail::next_event_index(s.t, cfg.diag_interval);
    std::size_t snap_k = detail::next_event_index(s.t, cfg.snap_interval);

    while (s.t < cfg.t_end - 1e-14 * std::max(1.0, cfg.t_end)) {
        double t_diag = static_cast<double>(diag_k) * cfg.diag_interval;
        double t_snap = static_cast<double>(snap_k) * cfg.snap_interval;
        double t_next = std::min({t_diag, t_snap, cfg.t_end});

        double dt = stable_dt(s, g, par, cfg.cfl) * cfg.debug_dt_scale;
        bool lands = s.t + dt >= t_next;
        if (lands) dt = t_next - s.t;

        s = (cfg.integrator == Integrator::Heun) ? step(s, g, par, cfg.bc, dt)
                                                 : step_imex(s, g, par, cfg.bc, dt);
        if (lands) {
            s.t = t_next;  // exact event time, no accumulation drift
            if (t_next == t_diag) {
                emit_record();
                ++diag_k;
            }
            if (t_next == t_snap) {
                emit_snapshot(snap_k);
                ++snap_k;
            }
        }
    }
    out.final_state = std::move(s);
    return out;
}

/// Builds the scenario state and runs the configured experiment.
inline RunResult run(const Config& cfg, RunHooks hooks = {}) {
    validate_config(cfg);
    Grid g(cfg.L, cfg.N);
    State s0 = build(cfg.scenario, g, cfg.params);
    return run_from_state(std::move(s0), g, cfg, std::move(hooks));
}

} // namespace radgas
