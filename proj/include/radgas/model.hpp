#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "radgas/errors.hpp"

// Constitutive laws, thermodynamic partials and entropy functionals for a
// viscous, heat-conducting gas with a fourth-power radiative contribution
// and a one-species Arrhenius reaction.  Everything here is a pure function
// of scalar state values; the solver and diagnostics call these per node.

namespace radgas {

// =============================================================================
// Parameters
// =============================================================================

struct Parameters {
    double R = 1.0;       // gas constant
    double Cv = 1.0;      // specific heat
    double a = 1.0;       // radiation constant
    double mu = 1.0;      // bulk viscosity
    double kappa1 = 1.0;  // conductivity offset
    double kappa2 = 1.0;  // conductivity slope
    double b = 4.0;       // conductivity temperature exponent
    double Krate = 1.0;   // Arrhenius prefactor
    double A = 1.0;       // activation energy
    double beta = 0.0;    // rate temperature exponent
    double lambda = 1.0;  // reaction heat release
    double d = 1.0;       // species diffusion

    /// True iff (b, beta) lie in the regime where global existence and decay
    /// toward the constant equilibrium are guaranteed.
    bool theorem_regime() const {
        return b > 11.0 / 3.0 && beta >= 0.0 && beta < b + 9.0;
    }
};

struct ValidationReport {
    bool valid = true;          // no sign violations
    bool in_regime = true;      // theorem hypotheses satisfied
    std::vector<std::string> issues;
};

/// Checks sign constraints (hard) and the theorem-regime hypotheses (soft).
/// Out-of-regime parameter sets are flagged but allowed, so experiments can
/// probe where the hypotheses matter.
inline ValidationReport validate_params(const Parameters& par) {
    ValidationReport rep;
    auto require_pos = [&](double x, const char* name) {
        if (!(x > 0.0)) {
            rep.valid = false;
            rep.issues.push_back(std::string(name) + " must be > 0");
        }
    };
    require_pos(par.R, "R");
    require_pos(par.Cv, "Cv");
    require_pos(par.a, "a");
    require_pos(par.mu, "mu");
    require_pos(par.kappa1, "kappa1");
    require_pos(par.kappa2, "kappa2");
    require_pos(par.b, "b");
    require_pos(par.Krate, "Krate");
    require_pos(par.A, "A");
    require_pos(par.lambda, "lambda");
    require_pos(par.d, "d");
    if (!(par.beta >= 0.0)) {
        rep.valid = false;
        rep.issues.push_back("beta must be >= 0");
    }
    if (rep.valid && !par.theorem_regime()) {
        rep.in_regime = false;
        rep.issues.push_back("outside theorem regime (need b > 11/3 and 0 <= beta < b+9)");
    }
    return rep;
}

namespace detail {

inline void check_vtheta(double v, double theta, const char* where) {
    if (!(v > 0.0) || !(theta > 0.0))
        throw DomainError(std::string(where) + ": requires v > 0 and theta > 0, got v=" +
                          std::to_string(v) + " theta=" + std::to_string(theta));
}

/// pow(x, e) with a fast path for small integer exponents (b and beta are
/// usually small integers and this sits in the solver's hot loop).
inline double pow_fast(double x, double e) {
    double r = std::nearbyint(e);
    if (r == e && r >= 0.0 && r <= 24.0) {
        double acc = 1.0;
        double base = x;
        auto n = static_cast<unsigned>(r);
        while (n != 0) {
            if (n & 1u) acc *= base;
            base *= base;
            n >>= 1u;
        }
        return acc;
    }
    return std::pow(x, e);
}

/// Mutation-testing hook: RADGAS_MUTATE=radiation_pressure_sign flips the
/// radiative pressure term so the verify suite can prove it catches a broken
/// constitutive law.  Resolved once at startup.
inline double radiation_pressure_sign() {
    static const double sign = [] {
        const char* m = std::getenv("RADGAS_MUTATE");
        return (m != nullptr && std::string(m) == "radiation_pressure_sign") ? -1.0 : 1.0;
    }();
    return sign;
}

} // namespace detail

// =============================================================================
// Constitutive laws
// =============================================================================

/// p(v,theta) = R theta / v + a theta^4 / 3
inline double pressure(double v, double theta, const Parameters& par) {
    detail::check_vtheta(v, theta, "pressure");
    double t2 = theta * theta;
    return par.R * theta / v + detail::radiation_pressure_sign() * par.a * t2 * t2 / 3.0;
}

/// e(v,theta) = Cv theta + a v theta^4
inline double internal_energy(double v, double theta, const Parameters& par) {
    detail::check_vtheta(v, theta, "internal_energy");
    double t2 = theta * theta;
    return par.Cv * theta + par.a * v * t2 * t2;
}

/// kappa(v,theta) = kappa1 + kappa2 v theta^b
inline double conductivity(double v, double theta, const Parameters& par) {
    detail::check_vtheta(v, theta, "conductivity");
    return par.kappa1 + par.kappa2 * v * detail::pow_fast(theta, par.b);
}

/// K(v,theta) = kappa1 theta / v + kappa2 theta^{b+1} / (b+1),
/// the conductivity potential with dK/dtheta = kappa(v,theta)/v.
inline double kappa_potential(double v, double theta, const Parameters& par) {
    detail::check_vtheta(v, theta, "kappa_potential");
    return par.kappa1 * theta / v +
           par.kappa2 * detail::pow_fast(theta, par.b + 1.0) / (par.b + 1.0);
}

/// Arrhenius rate phi(theta) = K theta^beta exp(-A/theta).  Underflow-safe:
/// exp(-A/theta) flushes to exactly 0 for theta near 0, matching the limit.
inline double reaction_rate(double theta, const Parameters& par) {
    if (!(theta > 0.0))
        throw DomainError("reaction_rate: requires theta > 0, got theta=" + std::to_string(theta));
    double amp = (par.beta == 0.0) ? par.Krate : par.Krate * detail::pow_fast(theta, par.beta);
    return amp * std::exp(-par.A / theta);
}

/// S(v,theta) = Cv ln(theta) + (4/3) a v theta^3 + R ln(v)
inline double entropy(double v, double theta, const Parameters& par) {
    detail::check_vtheta(v, theta, "entropy");
    return par.Cv * std::log(theta) + (4.0 / 3.0) * par.a * v * theta * theta * theta +
           par.R * std::log(v);
}

/// Normalized entropy around (v,theta) = (1,1): non-negative, zero only at
/// the equilibrium point.  This is the Lyapunov density of the system.
inline double normalized_entropy(double v, double theta, const Parameters& par) {
    detail::check_vtheta(v, theta, "normalized_entropy");
    double dt = theta - 1.0;
    return par.Cv * (theta - std::log(theta) - 1.0) + par.R * (v - std::log(v) - 1.0) +
           (par.a / 3.0) * v * dt * dt * (3.0 * theta * theta + 2.0 * theta + 1.0);
}

/// Expanded form of the normalized entropy,
///   Cv theta + a v theta^4 - (Cv + a) + (R + a/3)(v - 1) - (S - 4a/3),
/// kept as an independent algebraic route for cross-checks.
inline double normalized_entropy_expanded(double v, double theta, const Parameters& par) {
    detail::check_vtheta(v, theta, "normalized_entropy_expanded");
    return internal_energy(v, theta, par) - (par.Cv + par.a) +
           (par.R + par.a / 3.0) * (v - 1.0) -
           (entropy(v, theta, par) - (4.0 / 3.0) * par.a);
}

/// sigma = -p(v,theta) + mu u_x / v
inline double stress(double v, double theta, double u_x, const Parameters& par) {
    detail::check_vtheta(v, theta, "stress");
    return -pressure(v, theta, par) + par.mu * u_x / v;
}

// =============================================================================
// Thermodynamic partial derivatives
// =============================================================================

struct ThermoPartials {
    double p;        // pressure
    double p_v;      // dp/dv
    double p_theta;  // dp/dtheta
    double e;        // internal energy
    double e_v;      // de/dv
    double e_theta;  // de/dtheta
    double S_v;      // dS/dv   (= p_theta)
    double S_theta;  // dS/dtheta (= e_theta / theta)
};

/// All partials analytically; the Maxwell relations S_v = p_theta,
/// S_theta = e_theta/theta and e_v = theta p_theta - p hold by construction.
inline ThermoPartials partials(double v, double theta, const Parameters& par) {
    detail::check_vtheta(v, theta, "partials");
    double t2 = theta * theta;
    double t3 = t2 * theta;
    double t4 = t3 * theta;
    ThermoPartials tp;
    tp.p = pressure(v, theta, par);
    tp.p_v = -par.R * theta / (v * v);
    tp.p_theta = par.R / v + (4.0 / 3.0) * par.a * t3;
    tp.e = par.Cv * theta + par.a * v * t4;
    tp.e_v = par.a * t4;
    tp.e_theta = par.Cv + 4.0 * par.a * v * t3;
    tp.S_v = tp.p_theta;
    tp.S_theta = tp.e_theta / theta;
    return tp;
}

} // namespace radgas
