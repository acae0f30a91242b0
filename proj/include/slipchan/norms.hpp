#pragma once

/// @file norms.hpp
/// @brief Quadrature rules, deformation stencils, norms, inner products.
///
/// Every module measures fields through the helpers in this file, so the
/// definitional identities
///   v_norm^2 = symgrad^2 + alpha * l2_gamma^2,
///   h_norm^2 = l2_omega^2 + beta * l2_gamma^2
/// hold exactly, and the viscous operator (operators.hpp) is assembled from
/// the same stencils, making the discrete energy identity exact as well.
///
/// Quadrature points:
///   cells   (i=0..nx-1, j=0..ny-1): Dxx = du/dx, Dyy = dv/dy, weight dx dy
///   corners (j=0..ny): a = du/dy, b = dv/dx, weight corner_weight * dx dy.
/// At walls the derivative toward the boundary uses the half-spacing
/// one-sided difference against the boundary value (g at the lower wall,
/// zero at the upper wall and at the end columns in dirichlet mode).

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "slipchan/fields.hpp"
#include "slipchan/grid.hpp"

namespace slipchan {

struct NormReport {
    double l2_omega = 0.0;   ///< ||u||_{L2(Omega)}
    double l2_gamma = 0.0;   ///< ||g||_{L2(Gamma)}
    double grad_l2 = 0.0;    ///< ||grad u||_{L2}
    double symgrad_l2 = 0.0; ///< ||D u||_{L2}
    double v_norm = 0.0;     ///< sqrt(symgrad^2 + alpha l2_gamma^2)
    double h_norm = 0.0;     ///< sqrt(l2_omega^2 + beta l2_gamma^2)
    double l4_omega = 0.0;   ///< ||u||_{L4(Omega)}
};

namespace quad {

/// Trapezoid weight of a u-face / g-node column.
inline double u_col_weight(const Grid& grid, int i) {
    if (grid.periodic()) return 1.0;
    return (i == 0 || i == grid.nx) ? 0.5 : 1.0;
}

inline double cell_dxx(const Grid& grid, std::span<const double> u, int i, int j) {
    const int ie = grid.periodic() ? grid.wu(i + 1) : i + 1;
    return (u[grid.uidx(ie, j)] - u[grid.uidx(i, j)]) / grid.dx;
}

inline double cell_dyy(const Grid& grid, std::span<const double> v, int i, int j) {
    return (v[grid.vidx(i, j + 1)] - v[grid.vidx(i, j)]) / grid.dy;
}

/// du/dy at corner (i, j); i is a u-column index.
inline double corner_dyu(const Grid& grid, std::span<const double> u,
                         std::span<const double> g, int i, int j) {
    const double h2 = 0.5 * grid.dy;
    if (j == 0) return (u[grid.uidx(i, 0)] - g[i]) / h2;
    if (j == grid.ny) return (0.0 - u[grid.uidx(i, grid.ny - 1)]) / h2;
    return (u[grid.uidx(i, j)] - u[grid.uidx(i, j - 1)]) / grid.dy;
}

/// dv/dx at corner (i, j).
inline double corner_dxv(const Grid& grid, std::span<const double> v, int i, int j) {
    if (grid.periodic())
        return (v[grid.vidx(grid.wv(i), j)] - v[grid.vidx(grid.wv(i - 1), j)]) / grid.dx;
    const double h2 = 0.5 * grid.dx;
    if (i == 0) return (v[grid.vidx(0, j)] - 0.0) / h2;
    if (i == grid.nx) return (0.0 - v[grid.vidx(grid.nx - 1, j)]) / h2;
    return (v[grid.vidx(i, j)] - v[grid.vidx(i - 1, j)]) / grid.dx;
}

inline int corner_cols(const Grid& grid) { return grid.periodic() ? grid.nx : grid.nx + 1; }

} // namespace quad

/// L2(Omega)^2 of a velocity pair by the staggered face-midpoint rule.
inline double l2_omega_sq(const Grid& grid, std::span<const double> u,
                          std::span<const double> v) {
    const double vol = grid.dx * grid.dy;
    double s = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.ucols(); ++i) {
            const double w = u[grid.uidx(i, j)];
            s += quad::u_col_weight(grid, i) * w * w * vol;
        }
    for (int j = 0; j <= grid.ny; ++j) {
        const double wy = (j == 0 || j == grid.ny) ? 0.5 : 1.0;
        for (int i = 0; i < grid.nx; ++i) {
            const double w = v[grid.vidx(i, j)];
            s += wy * w * w * vol;
        }
    }
    return s;
}

inline double l2_gamma_sq(const Grid& grid, std::span<const double> g) {
    double s = 0.0;
    for (int i = 0; i < grid.ucols(); ++i)
        s += quad::u_col_weight(grid, i) * g[i] * g[i] * grid.dx;
    return s;
}

/// H inner product of two (u, v, g) triples.
inline double inner_h(const Grid& grid, double beta, const FlowState& a,
                      const FlowState& b) {
    const double vol = grid.dx * grid.dy;
    double s = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.ucols(); ++i)
            s += quad::u_col_weight(grid, i) * a.u[grid.uidx(i, j)] * b.u[grid.uidx(i, j)] * vol;
    for (int j = 0; j <= grid.ny; ++j) {
        const double wy = (j == 0 || j == grid.ny) ? 0.5 : 1.0;
        for (int i = 0; i < grid.nx; ++i)
            s += wy * a.v[grid.vidx(i, j)] * b.v[grid.vidx(i, j)] * vol;
    }
    for (int i = 0; i < grid.ucols(); ++i)
        s += beta * quad::u_col_weight(grid, i) * a.g[i] * b.g[i] * grid.dx;
    return s;
}

/// Squared symmetric-gradient and full-gradient seminorms.
struct GradientNorms {
    double symgrad_sq = 0.0;
    double grad_sq = 0.0;
};

inline GradientNorms gradient_norms(const Grid& grid, std::span<const double> u,
                                    std::span<const double> v,
                                    std::span<const double> g) {
    GradientNorms out;
    const double vol = grid.dx * grid.dy;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double dxx = quad::cell_dxx(grid, u, i, j);
            const double dyy = quad::cell_dyy(grid, v, i, j);
            out.symgrad_sq += (dxx * dxx + dyy * dyy) * vol;
            out.grad_sq += (dxx * dxx + dyy * dyy) * vol;
        }
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i < quad::corner_cols(grid); ++i) {
            const double a = quad::corner_dyu(grid, u, g, i, j);
            const double b = quad::corner_dxv(grid, v, i, j);
            const double w = grid.corner_weight(i, j) * vol;
            const double dxy = 0.5 * (a + b);
            out.symgrad_sq += 2.0 * dxy * dxy * w;
            out.grad_sq += (a * a + b * b) * w;
        }
    return out;
}

inline double l4_omega(const Grid& grid, std::span<const double> u,
                       std::span<const double> v) {
    const double vol = grid.dx * grid.dy;
    double s = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const int ie = grid.periodic() ? grid.wu(i + 1) : i + 1;
            const double uc = 0.5 * (u[grid.uidx(i, j)] + u[grid.uidx(ie, j)]);
            const double vc = 0.5 * (v[grid.vidx(i, j)] + v[grid.vidx(i, j + 1)]);
            const double m2 = uc * uc + vc * vc;
            s += m2 * m2 * vol;
        }
    return std::pow(s, 0.25);
}

inline NormReport compute_norms(const Grid& grid, const FlowState& state,
                                double alpha, double beta) {
    if (state.u.size() != grid.usize() || state.v.size() != grid.vsize() ||
        state.g.size() != grid.gsize())
        throw std::invalid_argument("compute_norms: field dimensions do not match grid");
    NormReport r;
    const double l2o = l2_omega_sq(grid, state.u, state.v);
    const double l2g = l2_gamma_sq(grid, state.g);
    const GradientNorms gn = gradient_norms(grid, state.u, state.v, state.g);
    r.l2_omega = std::sqrt(l2o);
    r.l2_gamma = std::sqrt(l2g);
    r.grad_l2 = std::sqrt(gn.grad_sq);
    r.symgrad_l2 = std::sqrt(gn.symgrad_sq);
    r.v_norm = std::sqrt(gn.symgrad_sq + alpha * l2g);
    r.h_norm = std::sqrt(l2o + beta * l2g);
    r.l4_omega = l4_omega(grid, state.u, state.v);
    return r;
}

/// Gap between the slip DOF and the quadratically extrapolated wall trace of
/// u; O(dy^2) for resolved trace-linked states. Diagnostic only.
inline double wall_trace_gap(const Grid& grid, const FlowState& state) {
    double gap = 0.0;
    for (int i = 0; i < grid.ucols(); ++i) {
        if (!grid.g_free(i)) continue;
        const double extrap =
            1.5 * state.u[grid.uidx(i, 0)] - 0.5 * state.u[grid.uidx(i, 1)];
        gap = std::max(gap, std::abs(state.g[i] - extrap));
    }
    return gap;
}

/// Max-norm of the discrete divergence over pressure cells.
inline double divergence_residual(const Grid& grid, const FlowState& state) {
    double m = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const int ie = grid.periodic() ? grid.wu(i + 1) : i + 1;
            const double d =
                (state.u[grid.uidx(ie, j)] - state.u[grid.uidx(i, j)]) / grid.dx +
                (state.v[grid.vidx(i, j + 1)] - state.v[grid.vidx(i, j)]) / grid.dy;
            m = std::max(m, std::abs(d));
        }
    return m;
}

// Linear-algebra style helpers on whole states (u, v, g move; p, t follow a).
inline void axpy_state(double c, const FlowState& x, FlowState& y) {
    for (std::size_t k = 0; k < y.u.size(); ++k) y.u[k] += c * x.u[k];
    for (std::size_t k = 0; k < y.v.size(); ++k) y.v[k] += c * x.v[k];
    for (std::size_t k = 0; k < y.g.size(); ++k) y.g[k] += c * x.g[k];
}

inline void scale_state(FlowState& x, double c) {
    for (auto& w : x.u) w *= c;
    for (auto& w : x.v) w *= c;
    for (auto& w : x.g) w *= c;
}

inline FlowState diff_state(const FlowState& a, const FlowState& b) {
    FlowState d = a;
    for (std::size_t k = 0; k < d.u.size(); ++k) d.u[k] -= b.u[k];
    for (std::size_t k = 0; k < d.v.size(); ++k) d.v[k] -= b.v[k];
    for (std::size_t k = 0; k < d.g.size(); ++k) d.g[k] -= b.g[k];
    return d;
}

} // namespace slipchan
