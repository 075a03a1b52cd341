// Command-line driver: run / verify / sweep / resume over the text config,
// CSV and checkpoint formats.  Exit codes: 0 success, 2 config or usage
// error, 3 solver blow-up, 4 verification failure.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "radgas/config.hpp"
#include "radgas/diagnostics.hpp"
#include "radgas/io.hpp"
#include "radgas/solver.hpp"
#include "radgas/verify.hpp"

namespace fs = std::filesystem;
using namespace radgas;

namespace {

Config load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

fs::path resolve_output_dir(const Config& cfg) {
    if (const char* env = std::getenv("RADGAS_OUTPUT_DIR"); env != nullptr && *env != '\0')
        return fs::path(env);
    return fs::path(cfg.output_dir);
}

/// Streams diagnostics rows and snapshots to the output directory while the
/// solver runs, then drops a final checkpoint.  Returns the process exit code.
int execute_run(const Config& cfg, const std::optional<Checkpoint>& start) {
    fs::path dir = resolve_output_dir(cfg);
    fs::create_directories(dir);

    std::ofstream diag(dir / "diagnostics.csv");
    if (!diag) {
        std::cerr << "radgas: cannot write to " << dir << "\n";
        return 2;
    }
    diag << kDiagnosticsHeader << "\n";

    Grid g = start ? start->grid : Grid(cfg.L, cfg.N);
    RunHooks hooks;
    hooks.on_record = [&](const DiagnosticsRecord& r) { diag << diagnostics_row(r) << "\n"; };
    hooks.on_snapshot = [&](std::size_t index, const State& s) {
        std::ofstream snap(dir / ("snap_" + std::to_string(index) + ".csv"));
        write_snapshot_csv(snap, s, g);
    };

    try {
        RunResult rr = start ? run_from_state(start->state, g, cfg, hooks)
                             : run_from_state(build(cfg.scenario, g, cfg.params), g, cfg, hooks);
        checkpoint_write((dir / "checkpoint.txt").string(), rr.final_state, g);
        std::cout << "run complete: t=" << detail::format_double(rr.final_state.t) << ", "
                  << rr.records.size() << " diagnostic records in " << dir.string() << "\n";
        return 0;
    } catch (const BlowUpError& e) {
        diag.flush();
        std::cerr << "radgas: blow-up at t=" << e.t << ", node " << e.node << ": " << e.what()
                  << "\n";
        std::cerr << "partial outputs retained in " << dir.string() << "\n";
        return 3;
    }
}

int cmd_run(const std::string& config_path, double dt_scale) {
    Config cfg = load_config(config_path);
    cfg.debug_dt_scale = dt_scale;
    auto rep = validate_params(cfg.params);
    if (!rep.in_regime)
        for (const auto& issue : rep.issues) std::cerr << "radgas: warning: " << issue << "\n";
    return execute_run(cfg, std::nullopt);
}

int cmd_resume(const std::string& checkpoint_path, double t_end,
               const std::optional<std::string>& config_path) {
    Config cfg = config_path ? load_config(*config_path) : Config{};
    Checkpoint cp = checkpoint_read(checkpoint_path);
    cfg.L = cp.grid.L;
    cfg.N = cp.grid.N;
    cfg.t_end = t_end;
    if (!(cp.state.t < t_end)) {
        std::cerr << "radgas: checkpoint time " << cp.state.t << " is not before t-end " << t_end
                  << "\n";
        return 2;
    }
    return execute_run(cfg, cp);
}

int cmd_verify(const std::optional<std::string>& config_path) {
    std::optional<Config> cfg;
    if (config_path) cfg = load_config(*config_path);
    verify::Report rep = verify::run_suite(cfg);
    verify::print_report(std::cout, rep);
    return rep.all_pass() ? 0 : 4;
}

int cmd_sweep(const std::string& config_path, unsigned levels) {
    if (levels < 2) {
        std::cerr << "radgas: sweep needs --levels >= 2\n";
        return 2;
    }
    Config base = load_config(config_path);
    fs::path dir = resolve_output_dir(base);
    fs::create_directories(dir);

    struct Level {
        std::size_t N;
        double dx;
        double res[3];
    };
    std::vector<Level> rows;
    for (unsigned lev = 0; lev < levels; ++lev) {
        Config cfg = base;
        cfg.N = base.N << lev;
        // the measurement interval refines with the grid so time-quadrature
        // error cannot floor the spatial convergence order
        cfg.diag_interval = base.diag_interval / static_cast<double>(1u << lev);
        cfg.snap_interval = base.t_end;  // snapshots are not the point of a sweep
        RunResult rr = run(cfg);
        auto bal = balance_residuals(rr.records, cfg.params.lambda);
        Level l;
        l.N = cfg.N;
        l.dx = Grid(cfg.L, cfg.N).dx;
        l.res[0] = bal.mass_res.back();
        l.res[1] = bal.l2_res.back();
        l.res[2] = bal.entropy_res.back();
        rows.push_back(l);
        std::cout << "level " << lev << ": N=" << l.N << " mass_res=" << l.res[0]
                  << " l2_res=" << l.res[1] << " entropy_res=" << l.res[2] << "\n";
    }

    std::ofstream out(dir / "sweep.csv");
    out << "level,N,dx,mass_res,l2_res,entropy_res,order_mass,order_l2,order_entropy\n";
    for (std::size_t lev = 0; lev < rows.size(); ++lev) {
        auto f = detail::format_double;
        out << lev << ',' << rows[lev].N << ',' << f(rows[lev].dx);
        for (int q = 0; q < 3; ++q) out << ',' << f(rows[lev].res[q]);
        for (int q = 0; q < 3; ++q) {
            out << ',';
            if (lev == 0) { out << '-'; continue; }
            double prev = rows[lev - 1].res[q];
            double cur = rows[lev].res[q];
            if (prev <= 1e-14 && cur <= 1e-14) out << "exact";
            else out << f(std::log2(prev / cur));
        }
        out << "\n";
    }
    std::cout << "sweep.csv written to " << dir.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radgas: 1-D viscous radiative reactive gas laboratory"};
    app.require_subcommand(1);

    std::string config_path, checkpoint_path;
    std::string verify_config;
    double t_end = 0.0;
    double dt_scale = 1.0;
    unsigned levels = 0;
    std::string resume_config;

    auto* run_cmd = app.add_subcommand("run", "integrate a configured experiment");
    run_cmd->add_option("config", config_path, "config file")->required();
    run_cmd->add_option("--debug-dt-scale", dt_scale,
                        "debug: scale the stable time step (values > 1 force instability)");

    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
    verify_cmd->add_option("config", verify_config, "optional config overriding the reference scales");

    auto* sweep_cmd = app.add_subcommand("sweep", "refinement study at N, 2N, 4N, ...");
    sweep_cmd->add_option("config", config_path, "config file")->required();
    sweep_cmd->add_option("--levels", levels, "number of refinement levels")->required();

    auto* resume_cmd = app.add_subcommand("resume", "continue a run from a checkpoint");
    resume_cmd->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
    resume_cmd->add_option("--t-end", t_end, "new end time")->required();
    resume_cmd->add_option("--config", resume_config,
                           "config supplying parameters and output settings");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(config_path, dt_scale);
        if (verify_cmd->parsed())
            return cmd_verify(verify_config.empty() ? std::nullopt
                                                    : std::optional<std::string>(verify_config));
        if (sweep_cmd->parsed()) return cmd_sweep(config_path, levels);
        if (resume_cmd->parsed())
            return cmd_resume(checkpoint_path, t_end,
                              resume_config.empty() ? std::nullopt
                                                    : std::optional<std::string>(resume_config));
    } catch (const ConfigError& e) {
        std::cerr << "radgas: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "radgas: " << e.what() << "\n";
        return 2;
    } catch (const BlowUpError& e) {
        std::cerr << "radgas: blow-up at t=" << e.t << ": " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "radgas: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
