#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "radgas/model.hpp"
#include "radgas/scenarios.hpp"
#include "radgas/solver_state.hpp"

// Run configuration and its text format: bracketed section headers over
// line-based key = value pairs.  Unknown keys are hard errors, missing keys
// take the documented defaults, parsing is locale-independent.

namespace radgas {

enum class Integrator { Heun, Imex };

struct Config {
    Parameters params;
    double L = 10.0;
    std::size_t N = 201;
    ScenarioSpec scenario;
    BoundaryMode bc = BoundaryMode::FarField;
    Integrator integrator = Integrator::Heun;
    double cfl = 0.4;
    double t_end = 1.0;
    double diag_interval = 0.1;
    double snap_interval = 1.0;
    std::string output_dir = "out";

    // CLI debug knob, not part of the config format: scales the stable time
    // step so instability handling can be exercised deliberately.
    double debug_dt_scale = 1.0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view s, int line) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" +
                          std::string(s) + "'");
    return out;
}

inline std::uint64_t parse_u64(std::string_view s, int line) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ConfigError("line " + std::to_string(line) + ": expected a non-negative integer, got '" +
                          std::string(s) + "'");
    return out;
}

/// Shortest-exact double formatting used by every text format in the
/// artifact: 17 significant digits round-trip IEEE doubles bit-exactly.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

/// Range and sign checks over a fully assembled Config.
inline void validate_config(const Config& cfg) {
    auto rep = validate_params(cfg.params);
    if (!rep.valid) {
        std::string msg = "config: invalid parameters:";
        for (const auto& is : rep.issues) msg += " " + is + ";";
        throw ConfigError(msg);
    }
    if (!(cfg.L > 0.0)) throw ConfigError("config: L must be > 0");
    if (cfg.N < 8) throw ConfigError("config: N must be >= 8");
    if (!(cfg.cfl > 0.0) || cfg.cfl > 1.0) throw ConfigError("config: cfl must lie in (0, 1]");
    if (!(cfg.t_end > 0.0)) throw ConfigError("config: t_end must be > 0");
    if (!(cfg.diag_interval > 0.0)) throw ConfigError("config: diag_interval must be > 0");
    if (!(cfg.snap_interval > 0.0)) throw ConfigError("config: snap_interval must be > 0");
    if (!(cfg.scenario.width > 0.0)) throw ConfigError("config: width must be > 0");
}

/// Parses the config text format.  Empty input yields the full default
/// Config.  Errors carry 1-based line numbers.
inline Config parse_config(std::string_view text) {
    Config cfg;
    enum class Sec { None, Params, Grid, Scenario, Time, Output };
    Sec sec = Sec::None;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        std::string_view body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;

        if (body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
            std::string_view name = detail::trim(body.substr(1, body.size() - 2));
            if (name == "params") sec = Sec::Params;
            else if (name == "grid") sec = Sec::Grid;
            else if (name == "scenario") sec = Sec::Scenario;
            else if (name == "time") sec = Sec::Time;
            else if (name == "output") sec = Sec::Output;
            else
                throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" +
                                  std::string(name) + "]");
            continue;
        }

        std::size_t eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string_view key = detail::trim(body.substr(0, eq));
        std::string_view val = detail::trim(body.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");

        auto num = [&] { return detail::parse_double(val, line_no); };
        auto unknown = [&]() -> ConfigError {
            return ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                               std::string(key) + "'");
        };

        switch (sec) {
        case Sec::None:
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        case Sec::Params:
            if (key == "R") cfg.params.R = num();
            else if (key == "Cv") cfg.params.Cv = num();
            else if (key == "a") cfg.params.a = num();
            else if (key == "mu") cfg.params.mu = num();
            else if (key == "kappa1") cfg.params.kappa1 = num();
            else if (key == "kappa2") cfg.params.kappa2 = num();
            else if (key == "b") cfg.params.b = num();
            else if (key == "Krate") cfg.params.Krate = num();
            else if (key == "A") cfg.params.A = num();
            else if (key == "beta") cfg.params.beta = num();
            else if (key == "lambda") cfg.params.lambda = num();
            else if (key == "d") cfg.params.d = num();
            else throw unknown();
            break;
        case Sec::Grid:
            if (key == "L") cfg.L = num();
            else if (key == "N") {
                double n = num();
                if (n < 1.0 || n != std::nearbyint(n))
                    throw ConfigError("line " + std::to_string(line_no) + ": N must be a positive integer");
                cfg.N = static_cast<std::size_t>(n);
            } else if (key == "bc") {
                if (val == "farfield") cfg.bc = BoundaryMode::FarField;
                else if (val == "insulated") cfg.bc = BoundaryMode::InsulatedWall;
                else throw ConfigError("line " + std::to_string(line_no) +
                                       ": bc must be 'farfield' or 'insulated'");
            } else throw unknown();
            break;
        case Sec::Scenario:
            if (key == "kind") {
                if (val == "equilibrium") cfg.scenario.kind = ScenarioKind::Equilibrium;
                else if (val == "gaussian") cfg.scenario.kind = ScenarioKind::Gaussian;
                else if (val == "multibump") cfg.scenario.kind = ScenarioKind::Multibump;
                else if (val == "seeded_random") cfg.scenario.kind = ScenarioKind::SeededRandom;
                else throw ConfigError("line " + std::to_string(line_no) + ": unknown scenario kind '" +
                                       std::string(val) + "'");
            }
            else if (key == "dv") cfg.scenario.dv = num();
            else if (key == "du") cfg.scenario.du = num();
            else if (key == "dtheta") cfg.scenario.dtheta = num();
            else if (key == "dz") cfg.scenario.dz = num();
            else if (key == "width") cfg.scenario.width = num();
            else if (key == "seed") cfg.scenario.seed = detail::parse_u64(val, line_no);
            else if (key == "centers") {
                cfg.scenario.centers.clear();
                std::string_view rest = val;
                while (!rest.empty()) {
                    std::size_t sp = rest.find(' ');
                    std::string_view tok = detail::trim(rest.substr(0, sp));
                    if (!tok.empty())
                        cfg.scenario.centers.push_back(detail::parse_double(tok, line_no));
                    rest = (sp == std::string_view::npos) ? std::string_view{} : rest.substr(sp + 1);
                }
                if (cfg.scenario.centers.empty())
                    throw ConfigError("line " + std::to_string(line_no) + ": centers needs at least one value");
            }
            else throw unknown();
            break;
        case Sec::Time:
            if (key == "integrator") {
                if (val == "heun") cfg.integrator = Integrator::Heun;
                else if (val == "imex") cfg.integrator = Integrator::Imex;
                else throw ConfigError("line " + std::to_string(line_no) +
                                       ": integrator must be 'heun' or 'imex'");
            }
            else if (key == "cfl") {
                cfg.cfl = num();
                if (!(cfg.cfl > 0.0) || cfg.cfl > 1.0)
                    throw ConfigError("line " + std::to_string(line_no) + ": cfl must lie in (0, 1]");
            }
            else if (key == "t_end") cfg.t_end = num();
            else throw unknown();
            break;
        case Sec::Output:
            if (key == "diag_interval") cfg.diag_interval = num();
            else if (key == "snap_interval") cfg.snap_interval = num();
            else if (key == "output_dir") cfg.output_dir = std::string(val);
            else throw unknown();
            break;
        }
    }
    validate_config(cfg);
    return cfg;
}

/// Canonical text form; parse(serialize(cfg)) reproduces cfg exactly.
inline std::string serialize_config(const Config& cfg) {
    std::ostringstream os;
    auto f = detail::format_double;
    os << "[params]\n";
    os << "R = " << f(cfg.params.R) << "\nCv = " << f(cfg.params.Cv) << "\na = " << f(cfg.params.a)
       << "\nmu = " << f(cfg.params.mu) << "\nkappa1 = " << f(cfg.params.kappa1)
       << "\nkappa2 = " << f(cfg.params.kappa2) << "\nb = " << f(cfg.params.b)
       << "\nKrate = " << f(cfg.params.Krate) << "\nA = " << f(cfg.params.A)
       << "\nbeta = " << f(cfg.params.beta) << "\nlambda = " << f(cfg.params.lambda)
       << "\nd = " << f(cfg.params.d) << "\n";
    os << "[grid]\n";
    os << "L = " << f(cfg.L) << "\nN = " << cfg.N << "\n";
    os << "bc = " << (cfg.bc == BoundaryMode::FarField ? "farfield" : "insulated") << "\n";
    os << "[scenario]\n";
    const char* kind = "equilibrium";
    if (cfg.scenario.kind == ScenarioKind::Gaussian) kind = "gaussian";
    else if (cfg.scenario.kind == ScenarioKind::Multibump) kind = "multibump";
    else if (cfg.scenario.kind == ScenarioKind::SeededRandom) kind = "seeded_random";
    os << "kind = " << kind << "\n";
    os << "dv = " << f(cfg.scenario.dv) << "\ndu = " << f(cfg.scenario.du)
       << "\ndtheta = " << f(cfg.scenario.dtheta) << "\ndz = " << f(cfg.scenario.dz)
       << "\nwidth = " << f(cfg.scenario.width) << "\n";
    os << "centers =";
    for (double c : cfg.scenario.centers) os << " " << f(c);
    os << "\nseed = " << cfg.scenario.seed << "\n";
    os << "[time]\n";
    os << "integrator = " << (cfg.integrator == Integrator::Heun ? "heun" : "imex") << "\n";
    os << "cfl = " << f(cfg.cfl) << "\nt_end = " << f(cfg.t_end) << "\n";
    os << "[output]\n";
    os << "diag_interval = " << f(cfg.diag_interval)
       << "\nsnap_interval = " << f(cfg.snap_interval)
       << "\noutput_dir = " << cfg.output_dir << "\n";
    return os.str();
}

} // namespace radgas
