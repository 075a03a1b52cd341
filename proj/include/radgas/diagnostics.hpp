#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "radgas/grid.hpp"
#include "radgas/model.hpp"
#include "radgas/solver_state.hpp"

// Evaluates the identities, functionals and bounds the analysis of the
// system rests on: reactant balances, the entropy-energy balance, the
// dissipation functional, window bounds for v and theta, the cut-off
// representation of the specific volume, the temperature floor and the
// large-time decay of perturbations.

namespace radgas {

// =============================================================================
// DiagnosticsRecord
// =============================================================================

// One time slice of every scalar diagnostic.  All fields above the
// accumulator block are pure functions of (t, state), which is what makes
// checkpoint/resume reproduce diagnostic rows bit-exactly.  X and W are
// stored in rate form (their time integrands); Y and Z as the instantaneous
// functionals whose running maxima define the bounds.
struct DiagnosticsRecord {
    double t = 0.0;

    double reactant_mass = 0.0;  // int z dx
    double reactant_l2 = 0.0;    // int z^2 dx
    double lyapunov = 0.0;       // int (S~ + u^2/2) dx
    double V = 0.0;              // int (mu u_x^2/(v th) + kappa th_x^2/(v th^2)) dx
    double X = 0.0;              // int (1 + th^{b+3}) th_t^2 dx
    double Y = 0.0;              // int (1 + th^{2b}) th_x^2 dx
    double Z = 0.0;              // int u_xx^2 dx
    double W = 0.0;              // int u_xt^2 dx

    double vmin = 0.0, vmax = 0.0;
    double thetamin = 0.0, thetamax = 0.0;
    double zmin = 0.0, zmax = 0.0;

    // norms of the perturbations (v-1, u, theta-1, z)
    Norms v_norms, u_norms, theta_norms, z_norms;

    // balance-law rates
    double burn_rate = 0.0;     // int phi z dx
    double l2_burn_rate = 0.0;  // 2 int (d z_x^2/v^2 + phi z^2) dx
    double diss_rate = 0.0;     // int (mu u_x^2/(v th) + kappa th_x^2/(v th^2) + lambda phi z / th) dx
    double source_rate = 0.0;   // lambda int phi z dx

    // trapezoid-in-time accumulators over the record sequence
    double reactant_burn_accum = 0.0;  // int_0^t int phi z dx ds
    double l2_burn_accum = 0.0;        // 2 int_0^t int (d z_x^2/v^2 + phi z^2) dx ds
    double dissipation_accum = 0.0;    // int_0^t diss_rate ds
    double source_accum = 0.0;         // lambda int_0^t int phi z dx ds
};

/// Rebuilds the four accumulators from the rate columns by trapezoid in
/// time.  Idempotent; records may come straight from a run or from a parsed
/// diagnostics CSV.
inline void accumulate_records(std::vector<DiagnosticsRecord>& recs) {
    if (recs.empty()) return;
    recs[0].reactant_burn_accum = 0.0;
    recs[0].l2_burn_accum = 0.0;
    recs[0].dissipation_accum = 0.0;
    recs[0].source_accum = 0.0;
    for (std::size_t i = 1; i < recs.size(); ++i) {
        double h = recs[i].t - recs[i - 1].t;
        auto& r = recs[i];
        const auto& q = recs[i - 1];
        r.reactant_burn_accum = q.reactant_burn_accum + 0.5 * h * (q.burn_rate + r.burn_rate);
        r.l2_burn_accum = q.l2_burn_accum + 0.5 * h * (q.l2_burn_rate + r.l2_burn_rate);
        r.dissipation_accum = q.dissipation_accum + 0.5 * h * (q.diss_rate + r.diss_rate);
        r.source_accum = q.source_accum + 0.5 * h * (q.source_rate + r.source_rate);
    }
}

// =============================================================================
// Instantaneous functionals
// =============================================================================

/// Entropy dissipation rate functional
/// V(t) = int (mu u_x^2/(v th) + kappa th_x^2/(v th^2)) dx >= 0.
inline double dissipation_V(const State& s, const Grid& g, const Parameters& par) {
    check_state(s, g);
    Field ux = ddx(s.u, g);
    Field tx = ddx(s.theta, g);
    Field integrand(g.N);
    for (std::size_t i = 0; i < g.N; ++i) {
        double v = s.v[i], th = s.theta[i];
        double kap = conductivity(v, th, par);
        integrand[i] = par.mu * ux[i] * ux[i] / (v * th) + kap * tx[i] * tx[i] / (v * th * th);
    }
    return integrate(integrand, g);
}

// =============================================================================
// Balance residuals
// =============================================================================

struct BalanceSeries {
    std::vector<double> t;
    std::vector<double> mass_res;     // reactant mass balance
    std::vector<double> l2_res;       // reactant L2 balance
    std::vector<double> entropy_res;  // entropy-energy balance
};

// Guard for relative-residual denominators.
inline constexpr double kResidualEps = 1e-300;

/// Relative residuals of the three balance laws along a record sequence.
/// The conserved entropy-energy combination is
///   lyapunov(t) + dissipation_accum(t) - source_accum(t) = lyapunov(0),
/// and the residual is normalized by the full conserved constant
///   C0 = lyapunov(0) + lambda int z0 dx,
/// which sets the scale of the balance even when the data start at the
/// entropy minimum.  lambda_heat is the reaction heat release of the run.
inline BalanceSeries balance_residuals(std::vector<DiagnosticsRecord> recs, double lambda_heat) {
    if (recs.size() < 2)
        throw InsufficientDataError("balance_residuals: need at least 2 records, got " +
                                    std::to_string(recs.size()));
    accumulate_records(recs);
    BalanceSeries out;
    double mass0 = recs[0].reactant_mass;
    double l20 = recs[0].reactant_l2;
    double lyap0 = recs[0].lyapunov;
    double c0 = lyap0 + lambda_heat * mass0;
    for (const auto& r : recs) {
        out.t.push_back(r.t);
        out.mass_res.push_back(std::abs(r.reactant_mass + r.reactant_burn_accum - mass0) /
                               std::max(mass0, kResidualEps));
        out.l2_res.push_back(std::abs(r.reactant_l2 + r.l2_burn_accum - l20) /
                             std::max(l20, kResidualEps));
        out.entropy_res.push_back(std::abs(r.lyapunov + r.dissipation_accum - r.source_accum - lyap0) /
                                  std::max(std::abs(c0), kResidualEps));
    }
    return out;
}

// =============================================================================
// X, Y, Z, W from a state series
// =============================================================================

struct XYZWSeries {
    std::vector<double> t;
    std::vector<double> X;  // int_0^t int (1+th^{b+3}) th_t^2 dx ds
    std::vector<double> Y;  // max_s int (1+th^{2b}) th_x^2 dx
    std::vector<double> Z;  // max_s int u_xx^2 dx
    std::vector<double> W;  // int_0^t int u_xt^2 dx ds
};

/// Builds the four control functionals from saved states at uniform time
/// spacing.  Time derivatives use central differences (one-sided at the
/// ends); X and W accumulate their rates by trapezoid, Y and Z are running
/// maxima.
inline XYZWSeries functionals_XYZW(const std::vector<State>& states, const Grid& g,
                                   const Parameters& par) {
    std::size_t n = states.size();
    if (n < 2) throw InsufficientDataError("functionals_XYZW: need at least 2 states");
    double h = states[1].t - states[0].t;
    if (!(h > 0.0)) throw Error("functionals_XYZW: states must be ordered in time");
    for (std::size_t j = 1; j < n; ++j)
        if (std::abs((states[j].t - states[j - 1].t) - h) > 1e-9 * std::max(1.0, h))
            throw Error("functionals_XYZW: states must be uniformly spaced in time");

    auto rate_fields = [&](std::size_t j) {
        // (X rate, Y value, Z value, W rate) at state j
        Field th_t(g.N), u_t(g.N);
        if (j == 0) {
            for (std::size_t i = 0; i < g.N; ++i) {
                th_t[i] = (states[1].theta[i] - states[0].theta[i]) / h;
                u_t[i] = (states[1].u[i] - states[0].u[i]) / h;
            }
        } else if (j + 1 == n) {
            for (std::size_t i = 0; i < g.N; ++i) {
                th_t[i] = (states[j].theta[i] - states[j - 1].theta[i]) / h;
                u_t[i] = (states[j].u[i] - states[j - 1].u[i]) / h;
            }
        } else {
            for (std::size_t i = 0; i < g.N; ++i) {
                th_t[i] = (states[j + 1].theta[i] - states[j - 1].theta[i]) / (2.0 * h);
                u_t[i] = (states[j + 1].u[i] - states[j - 1].u[i]) / (2.0 * h);
            }
        }
        Field th_x = ddx(states[j].theta, g);
        Field u_xx = d2dx(states[j].u, g);
        Field u_xt = ddx(u_t, g);
        Field xr(g.N), yv(g.N), zv(g.N), wr(g.N);
        for (std::size_t i = 0; i < g.N; ++i) {
            double th = states[j].theta[i];
            xr[i] = (1.0 + detail::pow_fast(th, par.b + 3.0)) * th_t[i] * th_t[i];
            yv[i] = (1.0 + detail::pow_fast(th, 2.0 * par.b)) * th_x[i] * th_x[i];
            zv[i] = u_xx[i] * u_xx[i];
            wr[i] = u_xt[i] * u_xt[i];
        }
        return std::array<double, 4>{integrate(xr, g), integrate(yv, g), integrate(zv, g),
                                     integrate(wr, g)};
    };

    XYZWSeries out;
    double x_acc = 0.0, w_acc = 0.0, y_max = 0.0, z_max = 0.0;
    std::array<double, 4> prev = rate_fields(0);
    y_max = prev[1];
    z_max = prev[2];
    out.t.push_back(states[0].t);
    out.X.push_back(0.0);
    out.Y.push_back(y_max);
    out.Z.push_back(z_max);
    out.W.push_back(0.0);
    for (std::size_t j = 1; j < n; ++j) {
        std::array<double, 4> cur = rate_fields(j);
        x_acc += 0.5 * h * (prev[0] + cur[0]);
        w_acc += 0.5 * h * (prev[3] + cur[3]);
        y_max = std::max(y_max, cur[1]);
        z_max = std::max(z_max, cur[2]);
        out.t.push_back(states[j].t);
        out.X.push_back(x_acc);
        out.Y.push_back(y_max);
        out.Z.push_back(z_max);
        out.W.push_back(w_acc);
        prev = cur;
    }
    return out;
}

// =============================================================================
// Entropy roots and window bounds
// =============================================================================

/// The two positive roots a1 <= 1 <= a2 of y - ln(y) - 1 = c, by bisection
/// to absolute tolerance 1e-12.  The lower root is bisected in s = -ln(y)
/// so the back-substitution residual stays small even for tiny roots.
inline std::pair<double, double> entropy_roots(double c) {
    if (c < 0.0) throw DomainError("entropy_roots: c must be >= 0, got " + std::to_string(c));
    if (c == 0.0) return {1.0, 1.0};

    // lower root: solve exp(-s) + s - 1 = c for s >= 0, monotone increasing
    double lo = 0.0, hi = c + 1.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = std::exp(-mid) + mid - 1.0 - c;
        (gm < 0.0 ? lo : hi) = mid;
    }
    double a1 = std::exp(-0.5 * (lo + hi));

    // upper root: y - ln(y) - 1 - c is monotone increasing on [1, inf)
    lo = 1.0;
    hi = 2.0 * c + 4.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = mid - std::log(mid) - 1.0 - c;
        (fm < 0.0 ? lo : hi) = mid;
    }
    double a2 = 0.5 * (lo + hi);
    return {a1, a2};
}

struct WindowBoundsReport {
    bool pass = false;
    double a1 = 1.0, a2 = 1.0;
    double mean_v = 0.0, mean_theta = 0.0;
    double tol = 0.0;
};

/// Checks the window bounds on the entropy window Omega_k = (-k-1, k+1):
/// the *means* of v and theta over the window satisfy a1 <= mean(v) and
/// mean(theta) <= a2, where (a1, a2) = entropy_roots(C0 / min(R, Cv)).
/// The mean (not the raw integral) is what Jensen's inequality applied to
/// the normalized-entropy bound controls; at equilibrium with C0 = 0 both
/// means equal 1 and the bounds hold with equality.
inline WindowBoundsReport window_bounds_check(const State& s, const Grid& g, const Parameters& par,
                                              double C0, unsigned k) {
    check_state(s, g);
    WindowBoundsReport rep;
    auto [a1, a2] = entropy_roots(std::max(0.0, C0) / std::min(par.R, par.Cv));
    rep.a1 = a1;
    rep.a2 = a2;
    double len = 2.0 * (static_cast<double>(k) + 1.0);
    rep.mean_v = window_integral(s.v, g, k) / len;
    rep.mean_theta = window_integral(s.theta, g, k) / len;
    rep.tol = 1e-8 * (1.0 + std::abs(a2));
    rep.pass = (rep.mean_v >= a1 - rep.tol) && (rep.mean_theta <= a2 + rep.tol);
    return rep;
}

// =============================================================================
// Representation of the specific volume
// =============================================================================

struct RepresentationReport {
    double sup = 0.0;   // sup of the relative residual over the window
    Field residual;     // per node, zero outside the window
};

namespace detail {

// Cut-off chi_k: 1 below k+1, linear down to 0 at k+2.
inline double cutoff_chi(double y, double kk) {
    if (y <= kk + 1.0) return 1.0;
    if (y >= kk + 2.0) return 0.0;
    return kk + 2.0 - y;
}

// Quadrature over one time interval of a positive integrand sampled at the
// endpoints, exact for exponential variation (the memory kernel of the
// representation formula is a pure exponential at equilibrium).
inline double loglinear_interval(double ga, double gb, double h) {
    if (!(ga > 0.0) || !(gb > 0.0)) return 0.5 * h * (ga + gb);
    double lr = std::log(gb / ga);
    if (std::abs(lr) < 1e-8) return 0.5 * h * (ga + gb);
    return h * (gb - ga) / lr;
}

} // namespace detail

/// Evaluates the cut-off representation of v(t,x) on the window
/// Omega_k = [-k-1, k+1] from a sequence of snapshots on [0, t]:
///   v(t,x) = B(t,x) Y(t) + (1/mu) int_0^t B(t,x) Y(t) v(s,x) p(s,x)
///                                          / (B(s,x) Y(s)) ds,
///   B(t,x) = v0(x) exp{(1/mu) int_x^inf (u0 - u(t,.)) chi_k dy},
///   Y(t)   = exp{(1/mu) int_0^t int_{k+1}^{k+2} sigma dy ds}.
/// Returns the relative residual |v - RHS| / v at the final snapshot time.
inline RepresentationReport representation_check(const std::vector<State>& states, const Grid& g,
                                                 const Parameters& par, unsigned k) {
    if (states.size() < 2)
        throw InsufficientDataError("representation_check: need at least 2 snapshots");
    double kk = static_cast<double>(k);
    if (kk + 2.0 > g.L + 1e-12)
        throw DomainError("representation_check: need k+2 <= L to fit the cut-off");

    std::size_t n = states.size();
    const State& s0 = states.front();
    const State& sn = states.back();

    // strip integrals of the stress over [k+1, k+2] per snapshot
    std::vector<double> strip(n);
    for (std::size_t j = 0; j < n; ++j) {
        Field ux = ddx(states[j].u, g);
        Field sigma(g.N);
        for (std::size_t i = 0; i < g.N; ++i)
            sigma[i] = stress(states[j].v[i], states[j].theta[i], ux[i], par);
        strip[j] = interval_integral(sigma, g, kk + 1.0, kk + 2.0);
    }
    // log Y by cumulative trapezoid in time
    std::vector<double> logY(n, 0.0);
    for (std::size_t j = 1; j < n; ++j)
        logY[j] = logY[j - 1] +
                  0.5 * (states[j].t - states[j - 1].t) * (strip[j - 1] + strip[j]) / par.mu;

    // log B per snapshot via suffix trapezoid of (u0 - u) chi_k
    std::vector<Field> logB(n, Field(g.N));
    Field h(g.N);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < g.N; ++i)
            h[i] = (s0.u[i] - states[j].u[i]) * detail::cutoff_chi(g.x[i], kk);
        double suffix = 0.0;
        logB[j][g.N - 1] = std::log(s0.v[g.N - 1]);
        for (std::size_t ir = g.N - 1; ir-- > 0;) {
            suffix += 0.5 * g.dx * (h[ir] + h[ir + 1]);
            logB[j][ir] = std::log(s0.v[ir]) + suffix / par.mu;
        }
    }

    RepresentationReport rep;
    rep.residual.assign(g.N, 0.0);
    for (std::size_t i = 0; i < g.N; ++i) {
        if (g.x[i] < -kk - 1.0 - 1e-12 || g.x[i] > kk + 1.0 + 1e-12) continue;
        double log_byt = logB[n - 1][i] + logY[n - 1];
        // memory integral with the ratio of kernels in log space
        double mem = 0.0;
        double g_prev = states[0].v[i] * pressure(states[0].v[i], states[0].theta[i], par) *
                        std::exp(log_byt - logB[0][i] - logY[0]);
        for (std::size_t j = 1; j < n; ++j) {
            double g_cur = states[j].v[i] * pressure(states[j].v[i], states[j].theta[i], par) *
                           std::exp(log_byt - logB[j][i] - logY[j]);
            mem += detail::loglinear_interval(g_prev, g_cur, states[j].t - states[j - 1].t);
            g_prev = g_cur;
        }
        double rhs = std::exp(log_byt) + mem / par.mu;
        rep.residual[i] = std::abs(sn.v[i] - rhs) / sn.v[i];
        rep.sup = std::max(rep.sup, rep.residual[i]);
    }
    return rep;
}

// =============================================================================
// Temperature floor
// =============================================================================

struct FloorReport {
    bool pass = false;
    double slope = 0.0;      // clamped-at-zero affine growth rate of max 1/theta
    double intercept = 0.0;
    double margin = 0.0;     // first-half excess over the fit
    double worst_excess = 0.0;
};

/// Checks the parabolic-maximum-principle shape of the temperature floor:
/// m(t) = max_x 1/theta may grow at most affinely.  Fits an affine envelope
/// on the first half of the record (growth rate clamped at >= 0, since decay
/// is always admissible) and passes iff the second half never exceeds the
/// extrapolated envelope by more than 10%.
inline FloorReport temperature_floor_check(const std::vector<DiagnosticsRecord>& recs) {
    if (recs.size() < 10)
        throw InsufficientDataError("temperature_floor_check: need at least 10 records");
    std::size_t n = recs.size();
    std::size_t half = n / 2;

    // least squares m ~ alpha + beta t on the first half
    double st = 0, sm = 0, stt = 0, stm = 0;
    for (std::size_t j = 0; j < half; ++j) {
        double t = recs[j].t;
        double m = 1.0 / recs[j].thetamin;
        st += t; sm += m; stt += t * t; stm += t * m;
    }
    double den = half * stt - st * st;
    double beta = (den > 0.0) ? (half * stm - st * sm) / den : 0.0;
    double alpha = (sm - beta * st) / static_cast<double>(half);

    FloorReport rep;
    rep.slope = std::max(beta, 0.0);
    rep.intercept = alpha;
    for (std::size_t j = 0; j < half; ++j) {
        double m = 1.0 / recs[j].thetamin;
        rep.margin = std::max(rep.margin, m - (alpha + rep.slope * recs[j].t));
    }
    rep.pass = true;
    for (std::size_t j = half; j < n; ++j) {
        double m = 1.0 / recs[j].thetamin;
        double envelope = alpha + rep.slope * recs[j].t + rep.margin;
        double excess = m / envelope - 1.0;
        rep.worst_excess = std::max(rep.worst_excess, excess);
        if (excess > 0.10) rep.pass = false;
    }
    return rep;
}

// =============================================================================
// Decay report
// =============================================================================

struct DecayComponent {
    std::string name;
    double linf_ref = 0.0;   // at t_end/10
    double linf_end = 0.0;   // at t_end
    double l2_ref = 0.0;
    double l2_end = 0.0;
    double grad_ref = 0.0;   // L2 of the gradient
    double grad_end = 0.0;
    double linf_ratio = 0.0;
};

struct DecayReport {
    std::vector<DecayComponent> components;
    double tail_dissipation_ratio = 0.0;  // gradient dissipation, late half / early half
    bool decaying = false;
};

/// Tabulates the perturbation norms against time and marks the run as
/// decaying iff the Linf norm of every component shrank from t_end/10 to
/// t_end.  Also reports the split of int ||(u_x, th_x, z_x)||^2 dt between
/// the two halves of the record.
inline DecayReport decay_report(const std::vector<DiagnosticsRecord>& recs) {
    if (recs.size() < 2 || recs.back().t - recs.front().t < 2.0 - 1e-9)
        throw InsufficientDataError("decay_report: need records spanning at least 2 time units");
    double t_end = recs.back().t;
    double t_ref = t_end / 10.0;
    auto at = [&](double t) -> const DiagnosticsRecord& {
        std::size_t best = 0;
        for (std::size_t j = 1; j < recs.size(); ++j)
            if (std::abs(recs[j].t - t) < std::abs(recs[best].t - t)) best = j;
        return recs[best];
    };
    const auto& rref = at(t_ref);
    const auto& rend = recs.back();

    DecayReport rep;
    auto add = [&](const char* name, const Norms& a, const Norms& b) {
        DecayComponent c;
        c.name = name;
        c.linf_ref = a.linf; c.linf_end = b.linf;
        c.l2_ref = a.l2; c.l2_end = b.l2;
        c.grad_ref = a.h1; c.grad_end = b.h1;
        c.linf_ratio = (a.linf > 0.0) ? b.linf / a.linf : 0.0;
        rep.components.push_back(c);
    };
    add("v-1", rref.v_norms, rend.v_norms);
    add("u", rref.u_norms, rend.u_norms);
    add("theta-1", rref.theta_norms, rend.theta_norms);
    add("z", rref.z_norms, rend.z_norms);
    rep.decaying = true;
    for (const auto& c : rep.components)
        if (c.linf_ratio >= 1.0) rep.decaying = false;

    // time-trapezoid of the squared gradient norms over the two halves
    double t_mid = 0.5 * (recs.front().t + t_end);
    double early = 0.0, late = 0.0;
    for (std::size_t j = 1; j < recs.size(); ++j) {
        double h = recs[j].t - recs[j - 1].t;
        auto val = [](const DiagnosticsRecord& r) {
            return r.u_norms.h1 * r.u_norms.h1 + r.theta_norms.h1 * r.theta_norms.h1 +
                   r.z_norms.h1 * r.z_norms.h1;
        };
        double seg = 0.5 * h * (val(recs[j - 1]) + val(recs[j]));
        if (recs[j].t <= t_mid + 1e-12) early += seg;
        else late += seg;
    }
    rep.tail_dissipation_ratio = late / std::max(early, kResidualEps);
    return rep;
}

// =============================================================================
// Proof exponents
// =============================================================================

/// The two interpolation exponents controlling the closure of the
/// X, Y, Z, W estimates; both lie in (0,1) inside the theorem regime and
/// lambda2 hits 1 exactly at the regime boundary b = 11/3.
inline std::pair<double, double> proof_exponents(double b) {
    if (!(b > 0.0)) throw DomainError("proof_exponents: b must be > 0");
    double m = std::max(1.0, std::max(0.0, 7.0 - b));
    double l1 = std::max({(b + 3.0) / (b + 5.0),
                          3.0 * (b + 3.0) / (8.0 * (b + 2.0)),
                          0.5,
                          3.0 * (b + 3.0) / (2.0 * (3.0 * b + 9.0 - 2.0 * m))});
    double l2 = std::max((3.0 * b + 9.0) / (4.0 * b + 10.0),
                         3.0 * (b + 3.0) / (2.0 * (2.0 * b + 6.0 - m)));
    return {l1, l2};
}

} // namespace radgas
