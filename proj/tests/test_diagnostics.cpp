#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "radgas/diagnostics.hpp"
#include "radgas/solver.hpp"

using namespace radgas;

namespace {

const Parameters kPar;

State equilibrium(const Grid& g) {
    State s;
    s.v.assign(g.N, 1.0);
    s.u.assign(g.N, 0.0);
    s.theta.assign(g.N, 1.0);
    s.z.assign(g.N, 0.0);
    return s;
}

RunResult small_gaussian_run(double t_end, double diag_interval) {
    Config cfg;
    cfg.L = 10.0;
    cfg.N = 400;
    cfg.t_end = t_end;
    cfg.diag_interval = diag_interval;
    cfg.snap_interval = t_end;
    cfg.scenario.kind = ScenarioKind::Gaussian;
    cfg.scenario.dv = 0.2;
    cfg.scenario.du = 0.2;
    cfg.scenario.dtheta = 0.4;
    cfg.scenario.dz = 0.8;
    cfg.scenario.width = 1.0;
    return run(cfg);
}

} // namespace

TEST_CASE("balance residuals vanish identically on an equilibrium trajectory") {
    Config cfg;
    cfg.L = 10.0;
    cfg.N = 64;
    cfg.t_end = 1.0;
    cfg.diag_interval = 0.1;
    cfg.snap_interval = 1.0;
    RunResult rr = run(cfg);
    auto bal = balance_residuals(rr.records, cfg.params.lambda);
    for (std::size_t j = 0; j < bal.t.size(); ++j) {
        CHECK(bal.mass_res[j] <= 1e-14);
        CHECK(bal.l2_res[j] <= 1e-14);
        CHECK(bal.entropy_res[j] <= 1e-14);
    }
    std::vector<DiagnosticsRecord> one(1);
    CHECK_THROWS_AS(balance_residuals(one, 1.0), InsufficientDataError);
}

TEST_CASE("uniform reactant burn matches the exact exponential balance") {
    // insulated walls, uniform state: the reactant mass obeys the scalar ODE
    Config cfg;
    cfg.L = 5.0;
    cfg.N = 64;
    cfg.bc = BoundaryMode::InsulatedWall;
    cfg.t_end = 1.0;
    cfg.diag_interval = 0.01;
    cfg.snap_interval = 1.0;
    Grid g(cfg.L, cfg.N);
    State s = equilibrium(g);
    s.z.assign(g.N, 0.5);
    RunResult rr = run_from_state(s, g, cfg);
    auto bal = balance_residuals(rr.records, cfg.params.lambda);
    CHECK(bal.mass_res.back() <= 1e-5);
    CHECK(bal.l2_res.back() <= 1e-5);
    CHECK(bal.entropy_res.back() <= 1e-5);
}

TEST_CASE("balance residuals shrink at second order under refinement") {
    double res[2][3];
    for (int lev = 0; lev < 2; ++lev) {
        Config cfg;
        cfg.L = 10.0;
        cfg.N = 200 << lev;
        cfg.t_end = 0.5;
        cfg.diag_interval = 0.02 / (1 << lev);
        cfg.snap_interval = 0.5;
        cfg.scenario.kind = ScenarioKind::Gaussian;
        cfg.scenario.dv = 0.3;
        cfg.scenario.dtheta = 0.6;
        cfg.scenario.dz = 1.0;
        cfg.scenario.width = 1.0;
        RunResult rr = run(cfg);
        auto bal = balance_residuals(rr.records, cfg.params.lambda);
        res[lev][0] = bal.mass_res.back();
        res[lev][1] = bal.l2_res.back();
        res[lev][2] = bal.entropy_res.back();
    }
    for (int q = 0; q < 3; ++q) {
        double order = std::log2(res[0][q] / res[1][q]);
        CHECK(order >= 1.8);
    }
}

TEST_CASE("dissipation functional: equilibrium, analytic bump, non-negativity") {
    Grid g(10.0, 801);
    CHECK(dissipation_V(equilibrium(g), g, kPar) == 0.0);

    // u = sin bump, v = theta = 1: V = mu int u_x^2 dx exactly
    State s = equilibrium(g);
    for (std::size_t i = 0; i < g.N; ++i)
        s.u[i] = std::sin(std::numbers::pi * g.x[i] / g.L);
    double v = dissipation_V(s, g, kPar);
    double exact = kPar.mu * std::numbers::pi * std::numbers::pi / (g.L);  // int cos^2 k x dx = L
    CHECK(v == doctest::Approx(exact).epsilon(1e-3));
    CHECK(v >= 0.0);

    s.theta[12] = -1.0;
    CHECK_THROWS_AS(dissipation_V(s, g, kPar), BlowUpError);
}

TEST_CASE("functionals XYZW: equilibrium zeros and frozen-state replay") {
    Grid g(10.0, 128);
    std::vector<State> states;
    for (int j = 0; j < 5; ++j) {
        State s = equilibrium(g);
        s.t = 0.1 * j;
        states.push_back(s);
    }
    auto eq = functionals_XYZW(states, g, kPar);
    for (std::size_t j = 0; j < eq.t.size(); ++j) {
        CHECK(eq.X[j] == 0.0);
        CHECK(eq.Y[j] == 0.0);
        CHECK(eq.Z[j] == 0.0);
        CHECK(eq.W[j] == 0.0);
    }

    // a frozen non-equilibrium state: zero time differences, so X = W = 0
    // while Y and Z equal their single-state values
    ScenarioSpec spec;
    spec.kind = ScenarioKind::Gaussian;
    spec.dtheta = 0.5;
    spec.du = 0.3;
    spec.width = 1.0;
    State frozen = build(spec, g, kPar);
    std::vector<State> replay;
    for (int j = 0; j < 3; ++j) {
        State s = frozen;
        s.t = 0.5 * j;
        replay.push_back(s);
    }
    auto fr = functionals_XYZW(replay, g, kPar);
    CHECK(fr.X.back() == 0.0);
    CHECK(fr.W.back() == 0.0);
    CHECK(fr.Y.back() > 0.0);
    CHECK(fr.Z.back() > 0.0);

    Field th_x = ddx(frozen.theta, g);
    Field yint(g.N);
    for (std::size_t i = 0; i < g.N; ++i) {
        double th = frozen.theta[i];
        yint[i] = (1.0 + std::pow(th, 2.0 * kPar.b)) * th_x[i] * th_x[i];
    }
    CHECK(fr.Y.back() == doctest::Approx(integrate(yint, g)).epsilon(1e-12));

    CHECK_THROWS_AS(functionals_XYZW({replay[0]}, g, kPar), InsufficientDataError);
}

TEST_CASE("entropy roots: closed forms, bisection oracle, back-substitution") {
    auto [a1, a2] = entropy_roots(0.0);
    CHECK(a1 == 1.0);
    CHECK(a2 == 1.0);

    auto [b1, b2] = entropy_roots(0.5);
    CHECK(b1 == doctest::Approx(0.3017).epsilon(2e-4));
    CHECK(b2 == doctest::Approx(2.3577).epsilon(2e-4));

    // independent Newton oracle started from crude brackets
    auto newton = [](double c, double y0) {
        double y = y0;
        for (int it = 0; it < 100; ++it) {
            double f = y - std::log(y) - 1.0 - c;
            double fp = 1.0 - 1.0 / y;
            double step = f / fp;
            y -= step;
            if (y <= 0.0) y = 1e-12;
            if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(y))) break;
        }
        return y;
    };
    for (double c : {0.1, 0.5, 2.0, 10.0}) {
        auto [lo, hi] = entropy_roots(c);
        CHECK(lo == doctest::Approx(newton(c, 0.01)).epsilon(1e-9));
        CHECK(hi == doctest::Approx(newton(c, c + 4.0)).epsilon(1e-9));
    }
    for (double c : {0.0, 1e-6, 0.3, 1.0, 3.0, 10.0, 31.6, 100.0}) {
        auto [lo, hi] = entropy_roots(c);
        CHECK(lo <= 1.0);
        CHECK(hi >= 1.0);
        CHECK(std::abs(lo - std::log(lo) - 1.0 - c) <= 1e-10);
        CHECK(std::abs(hi - std::log(hi) - 1.0 - c) <= 1e-10);
    }
    CHECK_THROWS_AS(entropy_roots(-0.5), DomainError);
}

TEST_CASE("window bounds: equilibrium equality margin, run states, violation") {
    Grid g(10.0, 801);
    State eq = equilibrium(g);
    auto rep = window_bounds_check(eq, g, kPar, 0.0, 0);
    CHECK(rep.pass);
    CHECK(rep.a1 == 1.0);
    CHECK(rep.a2 == 1.0);
    CHECK(rep.mean_v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.mean_theta == doctest::Approx(1.0).epsilon(1e-12));

    // a run state passes with C0 computed from its own initial record
    auto rr = small_gaussian_run(0.5, 0.1);
    double c0 = rr.records.front().lyapunov + kPar.lambda * rr.records.front().reactant_mass;
    Grid gr(10.0, 400);
    for (unsigned k : {0u, 3u, 8u}) {
        auto wr = window_bounds_check(rr.final_state, gr, kPar, c0, k);
        CHECK(wr.pass);
    }

    // engineered violation: a state with an enormous window temperature
    State hot = equilibrium(g);
    for (std::size_t i = 0; i < g.N; ++i) hot.theta[i] = 50.0;
    auto bad = window_bounds_check(hot, g, kPar, 0.5, 1);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("representation: equilibrium closure and quadratic time accuracy") {
    Grid g(10.0, 128);
    Parameters par;
    par.R = 1.0;
    par.a = 3.0;  // p0 = R + a/3 = 2
    auto make_states = [&](double spacing, int n) {
        std::vector<State> states;
        for (int j = 0; j < n; ++j) {
            State s = equilibrium(g);
            s.t = spacing * j;
            states.push_back(s);
        }
        return states;
    };
    // at equilibrium the memory kernel is a pure exponential and the
    // log-linear quadrature closes the identity to round-off
    auto rep = representation_check(make_states(0.05, 21), g, par, 1);
    CHECK(rep.sup <= 1e-12);

    CHECK_THROWS_AS(representation_check(make_states(0.05, 1), g, par, 1),
                    InsufficientDataError);
    Grid tight(2.5, 64);
    auto states_tight = std::vector<State>();
    for (int j = 0; j < 3; ++j) {
        State s;
        s.t = 0.1 * j;
        s.v.assign(tight.N, 1.0);
        s.u.assign(tight.N, 0.0);
        s.theta.assign(tight.N, 1.0);
        s.z.assign(tight.N, 0.0);
        states_tight.push_back(s);
    }
    CHECK_THROWS_AS(representation_check(states_tight, tight, par, 1), DomainError);
}

TEST_CASE("representation residual decreases when dx and snapshot spacing are halved") {
    double sup[2];
    for (int lev = 0; lev < 2; ++lev) {
        Config cfg;
        cfg.L = 10.0;
        cfg.N = 400 << lev;
        cfg.t_end = 0.5;
        cfg.diag_interval = 0.5;
        cfg.snap_interval = 0.05 / (1 << lev);
        cfg.scenario.kind = ScenarioKind::Gaussian;
        cfg.scenario.dv = 0.3;
        cfg.scenario.dtheta = 0.5;
        cfg.scenario.width = 1.0;
        std::vector<State> states;
        RunHooks hooks;
        hooks.on_snapshot = [&](std::size_t, const State& s) { states.push_back(s); };
        run(cfg, hooks);
        sup[lev] = representation_check(states, Grid(cfg.L, cfg.N), cfg.params, 1).sup;
    }
    CHECK(sup[1] < sup[0]);
}

TEST_CASE("temperature floor: equilibrium, decaying run, super-affine injection") {
    std::vector<DiagnosticsRecord> flat(20);
    for (int j = 0; j < 20; ++j) {
        flat[j].t = 0.1 * j;
        flat[j].thetamin = 1.0;
    }
    auto ok = temperature_floor_check(flat);
    CHECK(ok.pass);
    CHECK(ok.slope == 0.0);

    auto rr = small_gaussian_run(2.0, 0.05);
    CHECK(temperature_floor_check(rr.records).pass);

    std::vector<DiagnosticsRecord> expy(101);
    for (int j = 0; j <= 100; ++j) {
        expy[j].t = 0.1 * j;
        expy[j].thetamin = std::exp(-0.1 * j);  // max 1/theta = exp(t)
    }
    CHECK_FALSE(temperature_floor_check(expy).pass);

    std::vector<DiagnosticsRecord> few(5);
    CHECK_THROWS_AS(temperature_floor_check(few), InsufficientDataError);
}

TEST_CASE("decay report: equilibrium trivially decays") {
    Config cfg;
    cfg.L = 10.0;
    cfg.N = 64;
    cfg.t_end = 2.0;
    cfg.diag_interval = 0.25;
    cfg.snap_interval = 2.0;
    RunResult rr = run(cfg);
    auto rep = decay_report(rr.records);
    CHECK(rep.decaying);
    for (const auto& c : rep.components) {
        CHECK(c.linf_end <= 1e-14);
        CHECK(c.linf_ratio == 0.0);
    }
    std::vector<DiagnosticsRecord> short_recs(3);
    short_recs[0].t = 0.0;
    short_recs[1].t = 0.5;
    short_recs[2].t = 1.0;
    CHECK_THROWS_AS(decay_report(short_recs), InsufficientDataError);
}

TEST_CASE("proof exponents: closed-form values and regime behavior") {
    auto [l1a, l2a] = proof_exponents(4.0);
    CHECK(l1a == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
    CHECK(l2a == doctest::Approx(21.0 / 22.0).epsilon(1e-15));

    auto [l1b, l2b] = proof_exponents(10.0);
    CHECK(l1b == doctest::Approx(13.0 / 15.0).epsilon(1e-15));
    CHECK(l2b == doctest::Approx(39.0 / 50.0).epsilon(1e-15));

    // lambda2 = 1 exactly at the regime boundary b = 11/3
    auto [l1c, l2c] = proof_exponents(11.0 / 3.0);
    CHECK(std::abs(l2c - 1.0) <= 1e-12);
    (void)l1c;

    // lambda1 in (0,1) for b > 19/7; lambda2 in (0,1) for b > 11/3
    for (double b = 19.0 / 7.0 + 0.01; b < 20.0; b += 0.1) {
        auto [l1, l2] = proof_exponents(b);
        CHECK(l1 > 0.0);
        CHECK(l1 < 1.0);
        if (b > 11.0 / 3.0 + 1e-9) {
            CHECK(l2 > 0.0);
            CHECK(l2 < 1.0);
        }
    }
    CHECK_THROWS_AS(proof_exponents(0.0), DomainError);
    CHECK_THROWS_AS(proof_exponents(-2.0), DomainError);
}

TEST_CASE("V accumulates below the full dissipation rate") {
    auto rr = small_gaussian_run(0.5, 0.05);
    for (const auto& r : rr.records) {
        CHECK(r.V >= 0.0);
        CHECK(r.diss_rate >= r.V - 1e-15);
    }
}
