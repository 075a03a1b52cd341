#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "radgas/solver.hpp"

using namespace radgas;

namespace {

const Parameters kPar;

State uniform_state(const Grid& g, double v, double u, double th, double z) {
    State s;
    s.v.assign(g.N, v);
    s.u.assign(g.N, u);
    s.theta.assign(g.N, th);
    s.z.assign(g.N, z);
    return s;
}

State smooth_state(const Grid& g) {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::SeededRandom;
    spec.dv = 0.3;
    spec.du = 0.25;
    spec.dtheta = 0.4;
    spec.dz = 0.8;
    spec.seed = 424242;
    return build(spec, g, kPar);
}

// Independently coded right-hand side: ghost-padded arrays, std::pow
// everywhere, no fused loops.  Same discretization, different code path.
Tendency oracle_rhs(const State& s, const Grid& g, const Parameters& par, BoundaryMode bc) {
    std::size_t N = g.N;
    auto pad = [&](const Field& f, double sign) {
        std::vector<double> p(N + 2);
        for (std::size_t i = 0; i < N; ++i) p[i + 1] = f[i];
        p[0] = sign * f[1];
        p[N + 1] = sign * f[N - 2];
        return p;
    };
    auto v = pad(s.v, 1.0);
    auto u = pad(s.u, bc == BoundaryMode::InsulatedWall ? -1.0 : 1.0);
    auto th = pad(s.theta, 1.0);
    auto z = pad(s.z, 1.0);

    auto pres = [&](std::size_t j) {
        return par.R * th[j] / v[j] + par.a * std::pow(th[j], 4.0) / 3.0;
    };
    auto kap_over_v = [&](std::size_t j) {
        return (par.kappa1 + par.kappa2 * v[j] * std::pow(th[j], par.b)) / v[j];
    };
    auto phi = [&](std::size_t j) { return par.Krate * std::pow(th[j], par.beta) * std::exp(-par.A / th[j]); };

    Tendency rhs;
    rhs.dv.assign(N, 0.0);
    rhs.du.assign(N, 0.0);
    rhs.dtheta.assign(N, 0.0);
    rhs.dz.assign(N, 0.0);

    for (std::size_t i = 0; i < N; ++i) {
        std::size_t j = i + 1;
        bool interior = (i > 0 && i + 1 < N);
        if (bc == BoundaryMode::FarField && !interior) continue;

        double ux = (u[j + 1] - u[j - 1]) / (2.0 * g.dx);
        double flux_u_r = -0.5 * (pres(j) + pres(j + 1)) +
                          par.mu * 0.5 * (1.0 / v[j] + 1.0 / v[j + 1]) * (u[j + 1] - u[j]) / g.dx;
        double flux_u_l = -0.5 * (pres(j - 1) + pres(j)) +
                          par.mu * 0.5 * (1.0 / v[j - 1] + 1.0 / v[j]) * (u[j] - u[j - 1]) / g.dx;
        double flux_t_r = 0.5 * (kap_over_v(j) + kap_over_v(j + 1)) * (th[j + 1] - th[j]) / g.dx;
        double flux_t_l = 0.5 * (kap_over_v(j - 1) + kap_over_v(j)) * (th[j] - th[j - 1]) / g.dx;
        double flux_z_r = par.d * 0.5 * (1.0 / (v[j] * v[j]) + 1.0 / (v[j + 1] * v[j + 1])) *
                          (z[j + 1] - z[j]) / g.dx;
        double flux_z_l = par.d * 0.5 * (1.0 / (v[j - 1] * v[j - 1]) + 1.0 / (v[j] * v[j])) *
                          (z[j] - z[j - 1]) / g.dx;
        double e_th = par.Cv + 4.0 * par.a * v[j] * std::pow(th[j], 3.0);
        double th_pth = th[j] * (par.R / v[j] + 4.0 / 3.0 * par.a * std::pow(th[j], 3.0));

        rhs.dv[i] = ux;
        rhs.du[i] = (flux_u_r - flux_u_l) / g.dx;
        rhs.dtheta[i] = (-th_pth * ux + par.mu * ux * ux / v[j] + (flux_t_r - flux_t_l) / g.dx +
                         par.lambda * phi(j) * z[j]) / e_th;
        rhs.dz[i] = (flux_z_r - flux_z_l) / g.dx - phi(j) * z[j];
        if (bc == BoundaryMode::InsulatedWall && !interior) rhs.du[i] = 0.0;
    }
    return rhs;
}

} // namespace

TEST_CASE("equilibrium is an exact fixed point of the right-hand side") {
    Grid g(10.0, 128);
    State s = uniform_state(g, 1.0, 0.0, 1.0, 0.0);
    for (BoundaryMode bc : {BoundaryMode::FarField, BoundaryMode::InsulatedWall}) {
        Tendency k = compute_rhs(s, g, kPar, bc);
        for (std::size_t i = 0; i < g.N; ++i) {
            CHECK(k.dv[i] == 0.0);
            CHECK(k.du[i] == 0.0);
            CHECK(k.dtheta[i] == 0.0);
            CHECK(k.dz[i] == 0.0);
        }
    }
}

TEST_CASE("uniform reactant state reduces to the space-independent system") {
    Grid g(10.0, 128);
    double z0 = 0.25;
    State s = uniform_state(g, 1.0, 0.0, 1.0, z0);
    double phi1 = std::exp(-1.0);
    double e_th = 5.0;  // Cv + 4 a v th^3 at (1,1) with Cv = a = 1

    Tendency far = compute_rhs(s, g, kPar, BoundaryMode::FarField);
    for (std::size_t i = 1; i + 1 < g.N; ++i) {
        CHECK(far.dz[i] == doctest::Approx(-phi1 * z0).epsilon(1e-14));
        CHECK(far.dtheta[i] == doctest::Approx(phi1 * z0 / e_th).epsilon(1e-14));
        CHECK(far.dv[i] == 0.0);
        CHECK(far.du[i] == 0.0);
    }
    Tendency wall = compute_rhs(s, g, kPar, BoundaryMode::InsulatedWall);
    for (std::size_t i = 0; i < g.N; ++i) {
        CHECK(wall.dz[i] == doctest::Approx(-phi1 * z0).epsilon(1e-14));
        CHECK(wall.dtheta[i] == doctest::Approx(phi1 * z0 / e_th).epsilon(1e-14));
    }
}

TEST_CASE("compute_rhs matches the independent dense-stencil oracle") {
    Grid g(10.0, 257);
    State s = smooth_state(g);
    Parameters par;
    par.R = 1.2;
    par.Cv = 0.8;
    par.a = 0.6;
    par.mu = 1.4;
    par.kappa1 = 0.9;
    par.kappa2 = 1.1;
    par.b = 4.0;
    par.A = 1.3;
    par.lambda = 0.7;
    par.d = 1.6;

    for (BoundaryMode bc : {BoundaryMode::FarField, BoundaryMode::InsulatedWall}) {
        Tendency got = compute_rhs(s, g, par, bc);
        Tendency want = oracle_rhs(s, g, par, bc);
        for (std::size_t i = 0; i < g.N; ++i) {
            CHECK(std::abs(got.dv[i] - want.dv[i]) <= 1e-13 * (1.0 + std::abs(want.dv[i])));
            CHECK(std::abs(got.du[i] - want.du[i]) <= 1e-13 * (1.0 + std::abs(want.du[i])));
            CHECK(std::abs(got.dtheta[i] - want.dtheta[i]) <=
                  1e-13 * (1.0 + std::abs(want.dtheta[i])));
            CHECK(std::abs(got.dz[i] - want.dz[i]) <= 1e-13 * (1.0 + std::abs(want.dz[i])));
        }
    }
}

TEST_CASE("compute_rhs rejects invalid states naming the node") {
    Grid g(10.0, 64);
    State s = uniform_state(g, 1.0, 0.0, 1.0, 0.0);
    s.v[17] = -0.5;
    try {
        compute_rhs(s, g, kPar, BoundaryMode::FarField);
        FAIL("expected BlowUpError");
    } catch (const BlowUpError& e) {
        CHECK(e.node == 17);
    }
}

TEST_CASE("stable_dt: hand value and scalings") {
    Grid g(10.0, 201);  // dx = 0.1
    State s = uniform_state(g, 1.0, 0.0, 1.0, 0.0);
    double dt = stable_dt(s, g, kPar, 1.0);
    CHECK(dt == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(stable_dt(s, g, kPar, 0.5) == doctest::Approx(0.5 * dt).epsilon(1e-14));

    Grid g2(10.0, 101);  // dx doubles, diffusive cap quadruples
    State s2 = uniform_state(g2, 1.0, 0.0, 1.0, 0.0);
    CHECK(stable_dt(s2, g2, kPar, 1.0) == doctest::Approx(4.0 * dt).epsilon(1e-12));
}

TEST_CASE("Heun step: equilibrium fixed point to round-off") {
    Grid g(10.0, 128);
    State s = uniform_state(g, 1.0, 0.0, 1.0, 0.0);
    State s1 = step(s, g, kPar, BoundaryMode::FarField, 1e-3);
    CHECK(s1.t == doctest::Approx(1e-3).epsilon(1e-15));
    for (std::size_t i = 0; i < g.N; ++i) {
        CHECK(std::abs(s1.v[i] - 1.0) <= 1e-15);
        CHECK(std::abs(s1.u[i]) <= 1e-15);
        CHECK(std::abs(s1.theta[i] - 1.0) <= 1e-15);
        CHECK(std::abs(s1.z[i]) <= 1e-15);
    }
}

TEST_CASE("Heun reproduces the space-independent reaction ODE to second order") {
    // insulated walls keep a uniform state exactly uniform, so the PDE step
    // is the scalar ODE  z' = -phi(th) z,  th' = lambda phi(th) z / e_th
    Grid g(2.0, 16);
    double t_end = 0.5;

    // oracle: tiny-step RK4 on the 2-variable ODE
    double z_ref = 0.8, th_ref = 1.0;
    {
        int n = 200000;
        double h = t_end / n;
        auto f = [&](double th, double z, double& dth, double& dz) {
            double phi = std::exp(-1.0 / th);
            dz = -phi * z;
            dth = phi * z / (1.0 + 4.0 * th * th * th);
        };
        for (int k = 0; k < n; ++k) {
            double k1t, k1z, k2t, k2z, k3t, k3z, k4t, k4z;
            f(th_ref, z_ref, k1t, k1z);
            f(th_ref + 0.5 * h * k1t, z_ref + 0.5 * h * k1z, k2t, k2z);
            f(th_ref + 0.5 * h * k2t, z_ref + 0.5 * h * k2z, k3t, k3z);
            f(th_ref + h * k3t, z_ref + h * k3z, k4t, k4z);
            th_ref += h / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t);
            z_ref += h / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z);
        }
    }

    auto heun_err = [&](int steps) {
        State s = uniform_state(g, 1.0, 0.0, 1.0, 0.8);
        double dt = t_end / steps;
        for (int k = 0; k < steps; ++k) s = step(s, g, kPar, BoundaryMode::InsulatedWall, dt);
        return std::max(std::abs(s.z[g.N / 2] - z_ref), std::abs(s.theta[g.N / 2] - th_ref));
    };
    double e1 = heun_err(50);
    double e2 = heun_err(100);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
    CHECK(e2 < 1e-6);
}

TEST_CASE("Heun self-convergence order >= 1.8 on a smooth scenario") {
    Grid g(10.0, 129);
    State s0 = smooth_state(g);
    double t_end = 0.02;  // well under the stability cap at dx ~ 0.16

    auto advance = [&](int steps) {
        State s = s0;
        double dt = t_end / steps;
        for (int k = 0; k < steps; ++k) s = step(s, g, kPar, BoundaryMode::FarField, dt);
        return s;
    };
    auto dist = [&](const State& a, const State& b) {
        double m = 0.0;
        for (std::size_t i = 0; i < g.N; ++i)
            m = std::max({m, std::abs(a.v[i] - b.v[i]), std::abs(a.u[i] - b.u[i]),
                          std::abs(a.theta[i] - b.theta[i]), std::abs(a.z[i] - b.z[i])});
        return m;
    };
    State c = advance(8), m = advance(16), f = advance(32);
    double order = std::log2(dist(c, m) / dist(m, f));
    CHECK(order >= 1.8);
    CHECK(order <= 2.5);
}

TEST_CASE("reactant fraction stays within the proven bounds while stepping") {
    Grid g(10.0, 257);
    ScenarioSpec spec;
    spec.kind = ScenarioKind::Gaussian;
    spec.dz = 1.0;
    spec.dtheta = 0.8;
    spec.width = 1.5;
    State s = build(spec, g, kPar);
    for (int k = 0; k < 400; ++k) {
        s = step(s, g, kPar, BoundaryMode::FarField, stable_dt(s, g, kPar, 0.4));
        auto ez = extrema(s.z);
        CHECK(ez.min >= -kZSlack);
        CHECK(ez.max <= 1.0 + kZSlack);
    }
}

TEST_CASE("momentum drift vanishes for perturbations away from the boundary") {
    Grid g(10.0, 257);
    ScenarioSpec spec;
    spec.kind = ScenarioKind::Gaussian;
    spec.du = 0.4;
    spec.width = 1.0;
    State s = build(spec, g, kPar);
    double mom0 = integrate(s.u, g);
    double t_end = 1.0;
    while (s.t < t_end) {
        double dt = std::min(stable_dt(s, g, kPar, 0.4), t_end - s.t);
        s = step(s, g, kPar, BoundaryMode::FarField, dt);
    }
    CHECK(std::abs(integrate(s.u, g) - mom0) <= 1e-10 * t_end);
}

TEST_CASE("oversized steps blow up loudly, not silently") {
    Grid g(10.0, 257);
    ScenarioSpec spec;
    spec.kind = ScenarioKind::Gaussian;
    spec.dtheta = 1.0;
    spec.dv = 0.5;
    spec.width = 1.5;
    State s = build(spec, g, kPar);
    double dt = 2000.0 * stable_dt(s, g, kPar, 1.0);
    CHECK_THROWS_AS(
        {
            for (int k = 0; k < 50; ++k) s = step(s, g, kPar, BoundaryMode::FarField, dt);
        },
        BlowUpError);
}

TEST_CASE("IMEX: equilibrium fixed point and diffusion amplification") {
    Grid g(10.0, 128);
    State eq = uniform_state(g, 1.0, 0.0, 1.0, 0.0);
    State eq1 = step_imex(eq, g, kPar, BoundaryMode::FarField, 0.01);
    for (std::size_t i = 0; i < g.N; ++i) {
        CHECK(std::abs(eq1.v[i] - 1.0) <= 1e-14);
        CHECK(std::abs(eq1.theta[i] - 1.0) <= 1e-14);
    }

    // single Fourier mode under nearly pure conduction: theta perturbation
    // decays by the backward-Euler factor 1/(1 + D k^2 dt) per step
    Parameters par;
    par.kappa1 = 10.0;
    par.kappa2 = 1e-8;
    par.a = 1e-8;
    Grid gd(10.0, 256);
    double kmode = 4.0 * std::numbers::pi / (2.0 * gd.L);  // sin vanishes at both ends
    State s = uniform_state(gd, 1.0, 0.0, 1.0, 0.0);
    double eps = 1e-6;
    for (std::size_t i = 0; i < gd.N; ++i)
        s.theta[i] = 1.0 + eps * std::sin(kmode * (gd.x[i] + gd.L));

    double D = 10.0 / (1.0 + 4e-8);  // kappa / (v e_theta) at the base state
    double dt = 1e-3;
    int steps = 40;
    double amp0 = extrema(s.theta).max - 1.0;
    for (int k = 0; k < steps; ++k) s = step_imex(s, gd, par, BoundaryMode::FarField, dt);
    double amp1 = extrema(s.theta).max - 1.0;
    double k2 = (2.0 - 2.0 * std::cos(kmode * gd.dx)) / (gd.dx * gd.dx);  // discrete symbol
    double predicted = std::pow(1.0 / (1.0 + D * k2 * dt), steps);
    CHECK(amp1 / amp0 == doctest::Approx(predicted).epsilon(0.05));
}

TEST_CASE("IMEX agrees with Heun to first order as dt shrinks") {
    Grid g(10.0, 129);
    State s0 = smooth_state(g);
    auto gap = [&](double dt) {
        State a = step(s0, g, kPar, BoundaryMode::FarField, dt);
        State b = step_imex(s0, g, kPar, BoundaryMode::FarField, dt);
        double m = 0.0;
        for (std::size_t i = 0; i < g.N; ++i)
            m = std::max({m, std::abs(a.theta[i] - b.theta[i]), std::abs(a.z[i] - b.z[i])});
        return m;
    };
    double g1 = gap(4e-3);
    double g2 = gap(2e-3);
    double g3 = gap(1e-3);
    CHECK(g1 / g2 > 1.5);
    CHECK(g2 / g3 > 1.5);
}

TEST_CASE("run: equilibrium trajectory returns to itself and is deterministic") {
    Config cfg;
    cfg.L = 10.0;
    cfg.N = 64;
    cfg.t_end = 1.0;
    cfg.diag_interval = 0.25;
    cfg.snap_interval = 0.5;

    RunResult rr = run(cfg);
    CHECK(rr.final_state.t == 1.0);
    CHECK(rr.records.size() == 5);
    for (std::size_t i = 0; i < cfg.N; ++i) {
        CHECK(std::abs(rr.final_state.v[i] - 1.0) <= 1e-12);
        CHECK(std::abs(rr.final_state.theta[i] - 1.0) <= 1e-12);
    }

    cfg.scenario.kind = ScenarioKind::SeededRandom;
    cfg.scenario.dv = 0.2;
    cfg.scenario.dtheta = 0.3;
    cfg.scenario.dz = 0.5;
    cfg.scenario.seed = 7;
    RunResult a = run(cfg);
    RunResult b = run(cfg);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t j = 0; j < a.records.size(); ++j) {
        CHECK(a.records[j].t == b.records[j].t);
        CHECK(a.records[j].lyapunov == b.records[j].lyapunov);
        CHECK(a.records[j].V == b.records[j].V);
        CHECK(a.records[j].thetamax == b.records[j].thetamax);
    }
    for (std::size_t i = 0; i < cfg.N; ++i) CHECK(a.final_state.theta[i] == b.final_state.theta[i]);
}

TEST_CASE("run lands exactly on diagnostic times") {
    Config cfg;
    cfg.L = 10.0;
    cfg.N = 64;
    cfg.t_end = 0.7;
    cfg.diag_interval = 0.2;
    cfg.snap_interval = 0.35;
    cfg.scenario.kind = ScenarioKind::Gaussian;
    cfg.scenario.dtheta = 0.2;
    cfg.scenario.width = 1.0;
    RunResult rr = run(cfg);
    REQUIRE(rr.records.size() == 4);  // t = 0, 0.2, 0.4, 0.6
    for (std::size_t j = 0; j < rr.records.size(); ++j)
        CHECK(rr.records[j].t == static_cast<double>(j) * 0.2);
    CHECK(rr.final_state.t == 0.7);
}
