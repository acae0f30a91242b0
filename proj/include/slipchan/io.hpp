#pragma once

/// @file io.hpp
/// @brief Snapshot and series persistence. Snapshots are a flat binary
/// layout: int64 header (nx, ny, n_trunc, x_mode) + float64 time, followed by
/// the u, v, g, p arrays as stored (row-major, j slow, 64-bit floats).
/// Series go to CSV with columns t, h_norm, v_norm, div_residual,
/// energy_residual.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slipchan/fields.hpp"
#include "slipchan/grid.hpp"
#include "slipchan/stepper.hpp"

namespace slipchan {

inline void write_snapshot(const std::string& path, const Grid& grid,
                           const FlowState& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
    const std::int64_t header[4] = {grid.nx, grid.ny, grid.n_trunc,
                                    grid.periodic() ? 1 : 0};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(&s.t), sizeof(double));
    auto dump = [&](const std::vector<double>& a) {
        out.write(reinterpret_cast<const char*>(a.data()),
                  static_cast<std::streamsize>(a.size() * sizeof(double)));
    };
    dump(s.u);
    dump(s.v);
    dump(s.g);
    dump(s.p);
    if (!out) throw std::runtime_error("write_snapshot: write failed for " + path);
}

struct Snapshot {
    Grid grid;
    FlowState state;
};

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
    std::int64_t header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    double t = 0.0;
    in.read(reinterpret_cast<char*>(&t), sizeof(double));
    Snapshot snap;
    snap.grid = build_grid(static_cast<int>(header[2]), static_cast<int>(header[0]),
                           static_cast<int>(header[1]),
                           header[3] ? XMode::periodic : XMode::dirichlet_ends);
    snap.state = make_state(snap.grid);
    snap.state.t = t;
    auto load = [&](std::vector<double>& a) {
        in.read(reinterpret_cast<char*>(a.data()),
                static_cast<std::streamsize>(a.size() * sizeof(double)));
    };
    load(snap.state.u);
    load(snap.state.v);
    load(snap.state.g);
    load(snap.state.p);
    if (!in) throw std::runtime_error("read_snapshot: truncated file " + path);
    return snap;
}

inline void write_series_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_series_csv: cannot open " + path);
    out << "t,h_norm,v_norm,div_residual,energy_residual\n";
    char buf[192];
    for (const auto& r : traj.records) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                      r.h_norm, r.v_norm, r.div_residual, r.energy_residual);
        out << buf;
    }
}

/// Long-format CSV of a state for inspection: field,i,j,x,y,value.
inline void write_state_csv(const std::string& path, const Grid& grid,
                            const FlowState& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_state_csv: cannot open " + path);
    out << "field,i,j,x,y,value\n";
    char buf[192];
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.ucols(); ++i) {
            std::snprintf(buf, sizeof(buf), "u,%d,%d,%.17g,%.17g,%.17g\n", i, j,
                          grid.xu(i), grid.yu(j), s.u[grid.uidx(i, j)]);
            out << buf;
        }
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            std::snprintf(buf, sizeof(buf), "v,%d,%d,%.17g,%.17g,%.17g\n", i, j,
                          grid.xv(i), grid.yv(j), s.v[grid.vidx(i, j)]);
            out << buf;
        }
    for (int i = 0; i < grid.ucols(); ++i) {
        std::snprintf(buf, sizeof(buf), "g,%d,0,%.17g,0,%.17g\n", i, grid.xu(i), s.g[i]);
        out << buf;
    }
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            std::snprintf(buf, sizeof(buf), "p,%d,%d,%.17g,%.17g,%.17g\n", i, j,
                          grid.xp(i), grid.yp(j), s.p[grid.pidx(i, j)]);
            out << buf;
        }
}

} // namespace slipchan
