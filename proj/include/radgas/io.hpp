#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "radgas/config.hpp"
#include "radgas/diagnostics.hpp"
#include "radgas/grid.hpp"
#include "radgas/solver_state.hpp"

// Text formats: diagnostics CSV, snapshot CSV and the checkpoint.  All
// floating-point values are written with 17 significant digits so every
// double round-trips bit-exactly; parsing is locale-independent.

namespace radgas {

// Fixed column order.  The leading 27 columns are instantaneous functionals
// and norms; the trailing four are the balance-law rates from which the time
// accumulators are rebuilt by trapezoid, so the conservation identities are
// checkable from the CSV alone and rows stay reproducible across restarts.
inline constexpr const char* kDiagnosticsHeader =
    "t,reactant_mass,reactant_l2,lyapunov,V,X,Y,Z,W,"
    "vmin,vmax,thetamin,thetamax,zmin,zmax,"
    "v_l2,v_linf,v_h1,u_l2,u_linf,u_h1,theta_l2,theta_linf,theta_h1,z_l2,z_linf,z_h1,"
    "burn_rate,l2_burn_rate,diss_rate,source_rate";

inline constexpr int kDiagnosticsColumns = 31;

inline std::string diagnostics_row(const DiagnosticsRecord& r) {
    auto f = detail::format_double;
    std::string row;
    row.reserve(640);
    const double cols[kDiagnosticsColumns] = {
        r.t, r.reactant_mass, r.reactant_l2, r.lyapunov, r.V, r.X, r.Y, r.Z, r.W,
        r.vmin, r.vmax, r.thetamin, r.thetamax, r.zmin, r.zmax,
        r.v_norms.l2, r.v_norms.linf, r.v_norms.h1,
        r.u_norms.l2, r.u_norms.linf, r.u_norms.h1,
        r.theta_norms.l2, r.theta_norms.linf, r.theta_norms.h1,
        r.z_norms.l2, r.z_norms.linf, r.z_norms.h1,
        r.burn_rate, r.l2_burn_rate, r.diss_rate, r.source_rate};
    for (int i = 0; i < kDiagnosticsColumns; ++i) {
        if (i) row.push_back(',');
        row += f(cols[i]);
    }
    return row;
}

inline void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& recs) {
    os << kDiagnosticsHeader << "\n";
    for (const auto& r : recs) os << diagnostics_row(r) << "\n";
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t c = line.find(',', pos);
        if (c == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, c - pos));
        pos = c + 1;
    }
    return out;
}

inline double csv_double(std::string_view s, int line_no) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw FormatError("csv line " + std::to_string(line_no) + ": bad number '" +
                          std::string(s) + "'");
    return v;
}

} // namespace detail

/// Strict reader for the diagnostics CSV: exact header, constant column
/// count, plain numbers only.  Accumulators are rebuilt from the rates.
inline std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("diagnostics csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDiagnosticsHeader)
        throw FormatError("diagnostics csv: unexpected header");
    std::vector<DiagnosticsRecord> recs;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = detail::split_csv(line);
        if (cells.size() != kDiagnosticsColumns)
            throw FormatError("csv line " + std::to_string(line_no) + ": expected " +
                              std::to_string(kDiagnosticsColumns) + " columns, got " +
                              std::to_string(cells.size()));
        double c[kDiagnosticsColumns];
        for (int i = 0; i < kDiagnosticsColumns; ++i) c[i] = detail::csv_double(cells[i], line_no);
        DiagnosticsRecord r;
        r.t = c[0]; r.reactant_mass = c[1]; r.reactant_l2 = c[2]; r.lyapunov = c[3];
        r.V = c[4]; r.X = c[5]; r.Y = c[6]; r.Z = c[7]; r.W = c[8];
        r.vmin = c[9]; r.vmax = c[10]; r.thetamin = c[11]; r.thetamax = c[12];
        r.zmin = c[13]; r.zmax = c[14];
        r.v_norms.l2 = c[15]; r.v_norms.linf = c[16]; r.v_norms.h1 = c[17];
        r.u_norms.l2 = c[18]; r.u_norms.linf = c[19]; r.u_norms.h1 = c[20];
        r.theta_norms.l2 = c[21]; r.theta_norms.linf = c[22]; r.theta_norms.h1 = c[23];
        r.z_norms.l2 = c[24]; r.z_norms.linf = c[25]; r.z_norms.h1 = c[26];
        r.burn_rate = c[27]; r.l2_burn_rate = c[28]; r.diss_rate = c[29]; r.source_rate = c[30];
        recs.push_back(r);
    }
    accumulate_records(recs);
    return recs;
}

// =============================================================================
// Snapshots
// =============================================================================

inline void write_snapshot_csv(std::ostream& os, const State& s, const Grid& g) {
    auto f = detail::format_double;
    os << "x,v,u,theta,z\n";
    for (std::size_t i = 0; i < g.N; ++i)
        os << f(g.x[i]) << ',' << f(s.v[i]) << ',' << f(s.u[i]) << ',' << f(s.theta[i]) << ','
           << f(s.z[i]) << "\n";
}

/// Reads a snapshot CSV back into a State on the given grid.
inline State read_snapshot_csv(std::istream& is, const Grid& g, double t) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("snapshot csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,v,u,theta,z") throw FormatError("snapshot csv: unexpected header");
    State s;
    s.t = t;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = detail::split_csv(line);
        if (cells.size() != 5)
            throw FormatError("snapshot csv line " + std::to_string(line_no) +
                              ": expected 5 columns");
        s.v.push_back(detail::csv_double(cells[1], line_no));
        s.u.push_back(detail::csv_double(cells[2], line_no));
        s.theta.push_back(detail::csv_double(cells[3], line_no));
        s.z.push_back(detail::csv_double(cells[4], line_no));
    }
    if (s.v.size() != g.N)
        throw FormatError("snapshot csv: " + std::to_string(s.v.size()) + " rows for grid N=" +
                          std::to_string(g.N));
    return s;
}

// =============================================================================
// Checkpoints
// =============================================================================

inline void checkpoint_write(std::ostream& os, const State& s, const Grid& g) {
    auto f = detail::format_double;
    os << "# radgas-checkpoint v1\n";
    os << "t=" << f(s.t) << " N=" << g.N << " L=" << f(g.L) << "\n";
    for (std::size_t i = 0; i < g.N; ++i)
        os << f(g.x[i]) << ' ' << f(s.v[i]) << ' ' << f(s.u[i]) << ' ' << f(s.theta[i]) << ' '
           << f(s.z[i]) << "\n";
}

inline void checkpoint_write(const std::string& path, const State& s, const Grid& g) {
    std::ofstream os(path);
    if (!os) throw FormatError("checkpoint: cannot open '" + path + "' for writing");
    checkpoint_write(os, s, g);
}

struct Checkpoint {
    State state;
    Grid grid;
};

inline Checkpoint checkpoint_read(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("checkpoint line 1: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "# radgas-checkpoint v1")
        throw FormatError("checkpoint line 1: bad magic '" + line + "'");
    if (!std::getline(is, line)) throw FormatError("checkpoint line 2: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    double t = 0.0, L = 0.0;
    std::size_t N = 0;
    {
        std::istringstream hs(line);
        std::string tok;
        bool have_t = false, have_n = false, have_l = false;
        while (hs >> tok) {
            std::string_view sv(tok);
            if (sv.rfind("t=", 0) == 0) { t = detail::csv_double(sv.substr(2), 2); have_t = true; }
            else if (sv.rfind("N=", 0) == 0) {
                auto body = sv.substr(2);
                auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), N);
                if (ec != std::errc{} || p != body.data() + body.size())
                    throw FormatError("checkpoint line 2: bad N");
                have_n = true;
            }
            else if (sv.rfind("L=", 0) == 0) { L = detail::csv_double(sv.substr(2), 2); have_l = true; }
            else throw FormatError("checkpoint line 2: unexpected token '" + tok + "'");
        }
        if (!have_t || !have_n || !have_l)
            throw FormatError("checkpoint line 2: expected 't=... N=... L=...'");
    }

    Checkpoint cp{State{}, Grid(L, N)};
    cp.state.t = t;
    cp.state.v.reserve(N); cp.state.u.reserve(N);
    cp.state.theta.reserve(N); cp.state.z.reserve(N);
    int line_no = 2;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double vals[5];
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int c = 0; c < 5; ++c) {
            while (p != end && *p == ' ') ++p;
            auto [np, ec] = std::from_chars(p, end, vals[c]);
            if (ec != std::errc{})
                throw FormatError("checkpoint line " + std::to_string(line_no) +
                                  ": expected 'x v u theta z'");
            p = np;
        }
        while (p != end && *p == ' ') ++p;
        if (p != end)
            throw FormatError("checkpoint line " + std::to_string(line_no) + ": trailing data");
        cp.state.v.push_back(vals[1]);
        cp.state.u.push_back(vals[2]);
        cp.state.theta.push_back(vals[3]);
        cp.state.z.push_back(vals[4]);
    }
    if (cp.state.v.size() != N)
        throw FormatError("checkpoint: header says N=" + std::to_string(N) + " but found " +
                          std::to_string(cp.state.v.size()) + " rows");
    return cp;
}

inline Checkpoint checkpoint_read(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("checkpoint: cannot open '" + path + "'");
    return checkpoint_read(is);
}

} // namespace radgas
