#pragma once

/// @file grid.hpp
/// @brief MAC staggered grid on the truncated channel (-n, n) x (0, 1).
///
/// Layout (all arrays row-major, j slow):
///   u : x-velocity on vertical cell faces, positions (x_i, y_{j+1/2}),
///       i = 0..ucols-1, j = 0..ny-1.  In dirichlet_ends mode ucols = nx+1 and
///       the columns i = 0, nx are constrained to zero; periodic mode stores
///       the nx distinct columns.
///   v : y-velocity on horizontal faces, positions (x_{i+1/2}, y_j),
///       i = 0..nx-1, j = 0..ny.  Rows j = 0 and j = ny are the impermeable
///       walls and are constrained to zero.
///   g : slip velocity on the lower wall, same x-positions as u columns.
///   p : cell-centered pressure, i = 0..nx-1, j = 0..ny-1.

#include <cstddef>
#include <stdexcept>

namespace slipchan {

enum class XMode { dirichlet_ends, periodic };

struct Grid {
    int n_trunc = 1;
    int nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0;
    XMode x_mode = XMode::dirichlet_ends;

    double x0() const { return -static_cast<double>(n_trunc); }
    bool periodic() const { return x_mode == XMode::periodic; }

    int ucols() const { return periodic() ? nx : nx + 1; }

    // coordinates
    double xu(int i) const { return x0() + i * dx; }        // u/g columns
    double yu(int j) const { return (j + 0.5) * dy; }       // u rows
    double xv(int i) const { return x0() + (i + 0.5) * dx; } // v columns
    double yv(int j) const { return j * dy; }               // v rows
    double xp(int i) const { return xv(i); }
    double yp(int j) const { return yu(j); }

    // flat indices
    std::size_t uidx(int i, int j) const { return static_cast<std::size_t>(j) * ucols() + i; }
    std::size_t vidx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    std::size_t pidx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

    std::size_t usize() const { return static_cast<std::size_t>(ucols()) * ny; }
    std::size_t vsize() const { return static_cast<std::size_t>(nx) * (ny + 1); }
    std::size_t gsize() const { return static_cast<std::size_t>(ucols()); }
    std::size_t psize() const { return static_cast<std::size_t>(nx) * ny; }

    /// Wrap a u/g column index (periodic) or pass it through (dirichlet).
    int wu(int i) const {
        if (!periodic()) return i;
        int m = i % nx;
        return m < 0 ? m + nx : m;
    }
    /// Wrap a v/p column index.
    int wv(int i) const {
        if (!periodic()) return i;
        int m = i % nx;
        return m < 0 ? m + nx : m;
    }

    bool u_free(int i, int /*j*/) const {
        return periodic() || (i > 0 && i < nx);
    }
    bool v_free(int /*i*/, int j) const { return j > 0 && j < ny; }
    bool g_free(int i) const { return periodic() || (i > 0 && i < nx); }

    /// Quadrature weight factor for the corner point (i, j): 1/2 on each wall
    /// the corner lies on (bottom/top rows, and the end columns in
    /// dirichlet_ends mode).
    double corner_weight(int i, int j) const {
        double w = (j == 0 || j == ny) ? 0.5 : 1.0;
        if (!periodic() && (i == 0 || i == nx)) w *= 0.5;
        return w;
    }
};

/// Build and validate a grid. dx = 2 n_trunc / nx, dy = 1 / ny.
inline Grid build_grid(int n_trunc, int nx, int ny,
                       XMode x_mode = XMode::dirichlet_ends) {
    if (n_trunc < 1) throw std::invalid_argument("build_grid: n_trunc must be >= 1");
    if (nx < 4 || ny < 4) throw std::invalid_argument("build_grid: grid too coarse (nx, ny >= 4 required)");
    Grid grid;
    grid.n_trunc = n_trunc;
    grid.nx = nx;
    grid.ny = ny;
    grid.dx = 2.0 * n_trunc / nx;
    grid.dy = 1.0 / ny;
    grid.x_mode = x_mode;
    return grid;
}

} // namespace slipchan
