#pragma once

/// @file fields.hpp
/// @brief Discrete flow state, forcing data, and admissible field generators.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "slipchan/grid.hpp"
#include "slipchan/rng.hpp"

namespace slipchan {

/// Discrete (u, g, pi) at one time level. Constrained entries (end columns in
/// dirichlet mode, wall rows of v) are stored and kept at zero.
struct FlowState {
    std::vector<double> u, v, g, p;
    double t = 0.0;
};

inline FlowState make_state(const Grid& grid) {
    FlowState s;
    s.u.assign(grid.usize(), 0.0);
    s.v.assign(grid.vsize(), 0.0);
    s.g.assign(grid.gsize(), 0.0);
    s.p.assign(grid.psize(), 0.0);
    return s;
}

/// Zero out constrained entries; call after any direct field manipulation.
inline void enforce_constraints(const Grid& grid, FlowState& s) {
    if (!grid.periodic()) {
        for (int j = 0; j < grid.ny; ++j) {
            s.u[grid.uidx(0, j)] = 0.0;
            s.u[grid.uidx(grid.nx, j)] = 0.0;
        }
        s.g[0] = 0.0;
        s.g[grid.nx] = 0.0;
    }
    for (int i = 0; i < grid.nx; ++i) {
        s.v[grid.vidx(i, 0)] = 0.0;
        s.v[grid.vidx(i, grid.ny)] = 0.0;
    }
}

// ---------------------------------------------------------------------------
// Stream-function initialization
// ---------------------------------------------------------------------------

/// Compactly supported C^inf bump: exp(1 - 1/(1-t^2)) for |t| < 1, else 0.
inline double bump(double t) {
    const double t2 = t * t;
    if (t2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t2));
}

/// d/dt of bump(t).
inline double bump_prime(double t) {
    const double t2 = t * t;
    if (t2 >= 1.0) return 0.0;
    const double d = 1.0 - t2;
    return bump(t) * (-2.0 * t / (d * d));
}

/// Wall profile eta(y) = y (1-y)^2: eta(0) = 0, eta'(0) = 1, eta(1) = eta'(1) = 0.
/// Stream functions chi(x) eta(y) therefore produce fields with u.n = 0 on the
/// lower wall, a free slip trace there, and a no-slip upper wall.
inline double eta_wall(double y) { return y * (1.0 - y) * (1.0 - y); }
inline double eta_wall_prime(double y) { return (1.0 - y) * (1.0 - 3.0 * y); }

/// Sum of a few random compact bumps in x; value and derivative.
struct BumpProfile {
    struct Term { double amp, center, width; };
    std::vector<Term> terms;

    double value(double x) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.amp * bump((x - t.center) / t.width);
        return s;
    }
    double deriv(double x) const {
        double s = 0.0;
        for (const auto& t : terms)
            s += t.amp / t.width * bump_prime((x - t.center) / t.width);
        return s;
    }
};

/// Random x-profile supported strictly inside (-extent, extent).
inline BumpProfile random_bump_profile(Rng& rng, double extent, int n_terms = 3) {
    BumpProfile prof;
    for (int k = 0; k < n_terms; ++k) {
        BumpProfile::Term t;
        t.width = rng.uniform(0.3, 0.9) * extent;
        t.center = rng.uniform(-(extent - t.width), extent - t.width);
        t.amp = rng.uniform(-1.0, 1.0);
        prof.terms.push_back(t);
    }
    return prof;
}

/// Build a discretely divergence-free state from a stream function given at
/// corner nodes: u = dpsi/dy on u-faces, v = -dpsi/dx on v-faces. The slip
/// trace g is the analytic wall derivative d_y psi(x, 0).
inline FlowState state_from_stream(const Grid& grid,
                                   const std::function<double(double, double)>& psi,
                                   const std::function<double(double)>& wall_dy_psi) {
    FlowState s = make_state(grid);
    const int uc = grid.ucols();
    // corner values of psi, row-major (ny+1) x (corner columns)
    const int ccols = grid.periodic() ? grid.nx : grid.nx + 1;
    std::vector<double> ps(static_cast<std::size_t>(ccols) * (grid.ny + 1));
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i < ccols; ++i)
            ps[static_cast<std::size_t>(j) * ccols + i] = psi(grid.xu(i), grid.yv(j));
    auto P = [&](int i, int j) {
        return ps[static_cast<std::size_t>(j) * ccols + grid.wu(i)];
    };
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < uc; ++i)
            s.u[grid.uidx(i, j)] = (P(i, j + 1) - P(i, j)) / grid.dy;
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            s.v[grid.vidx(i, j)] = -(P(i + 1, j) - P(i, j)) / grid.dx;
    for (int i = 0; i < uc; ++i) s.g[i] = wall_dy_psi(grid.xu(i));
    enforce_constraints(grid, s);
    return s;
}

/// Random admissible, divergence-free sample field psi = chi(x) eta(y).
/// In periodic mode the support requirement is dropped and a smooth periodic
/// chi is used instead.
inline FlowState random_stream_state(const Grid& grid, Rng& rng) {
    if (grid.periodic()) {
        const double k = 1.0 + std::floor(rng.uniform(0.0, 3.0));
        const double phase = rng.uniform(0.0, 6.283185307179586);
        const double amp = rng.uniform(-1.0, 1.0);
        const double freq = 3.141592653589793 * k / grid.n_trunc;
        auto chi = [=](double x) { return amp * std::sin(freq * x + phase); };
        return state_from_stream(
            grid, [=](double x, double y) { return chi(x) * eta_wall(y); },
            [=](double x) { return chi(x); });
    }
    const BumpProfile chi = random_bump_profile(rng, 0.9 * grid.n_trunc);
    return state_from_stream(
        grid, [chi](double x, double y) { return chi.value(x) * eta_wall(y); },
        [chi](double x) { return chi.value(x); });
}

// ---------------------------------------------------------------------------
// Forcing
// ---------------------------------------------------------------------------

/// Body force sampled on velocity faces plus boundary force on g-nodes.
struct Forcing {
    std::vector<double> fu, fv; ///< body force components on u/v faces
    std::vector<double> hg;     ///< boundary force (x-component) on g nodes
    bool time_dependent = false;

    /// ||(f,h)||_H^2 = ||f||_{L2}^2 + beta ||h||_{L2(Gamma)}^2 by the grid
    /// quadrature (free DOFs carry the full weight; constrained entries are 0).
    double h_norm_sq(const Grid& grid, double beta) const {
        double a = 0.0;
        const double vol = grid.dx * grid.dy;
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.ucols(); ++i)
                if (grid.u_free(i, j)) {
                    const double w = fu[grid.uidx(i, j)];
                    a += w * w * vol;
                }
        for (int j = 0; j <= grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i)
                if (grid.v_free(i, j)) {
                    const double w = fv[grid.vidx(i, j)];
                    a += w * w * vol;
                }
        double b = 0.0;
        for (int i = 0; i < grid.ucols(); ++i)
            if (grid.g_free(i)) b += hg[i] * hg[i] * grid.dx;
        return a + beta * b;
    }
    double h_norm(const Grid& grid, double beta) const {
        return std::sqrt(h_norm_sq(grid, beta));
    }
};

inline Forcing make_forcing(const Grid& grid) {
    Forcing f;
    f.fu.assign(grid.usize(), 0.0);
    f.fv.assign(grid.vsize(), 0.0);
    f.hg.assign(grid.gsize(), 0.0);
    return f;
}

/// Sample analytic forcing (fx, fy, h) onto grid faces.
inline Forcing sample_forcing(const Grid& grid,
                              const std::function<double(double, double)>& fx,
                              const std::function<double(double, double)>& fy,
                              const std::function<double(double)>& h) {
    Forcing f = make_forcing(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.ucols(); ++i)
            if (grid.u_free(i, j)) f.fu[grid.uidx(i, j)] = fx(grid.xu(i), grid.yu(j));
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            if (grid.v_free(i, j)) f.fv[grid.vidx(i, j)] = fy(grid.xv(i), grid.yv(j));
    for (int i = 0; i < grid.ucols(); ++i)
        if (grid.g_free(i)) f.hg[i] = h(grid.xu(i));
    return f;
}

/// Gaussian bump in x with a C^2 compact cutoff at |x - x0| = 4 sigma, so the
/// support fits inside a finite truncation as the exhaustion study requires.
inline double gaussian_bump(double x, double x0, double sigma) {
    const double r = 4.0 * sigma;
    const double w = 0.5 * sigma;
    const double d = std::abs(x - x0);
    if (d >= r) return 0.0;
    const double core = std::exp(-0.5 * (x - x0) * (x - x0) / (sigma * sigma));
    if (d <= r - w) return core;
    const double s = (r - d) / w; // in (0, 1)
    return core * s * s * (3.0 - 2.0 * s);
}

enum class ForcingKind { zero, constant_x, gaussian_bump_x, boundary_bump };

/// Build one of the named analytic forcing templates.
///   constant_x      : f = (amp, 0), h = 0
///   gaussian_bump_x : f = (amp bump(x) eta'(y-profile), 0), h = 0
///   boundary_bump   : f = 0, h = amp bump(x)
inline Forcing make_template_forcing(const Grid& grid, ForcingKind kind,
                                     double amp = 1.0, double x0 = 0.0,
                                     double sigma = 0.75) {
    switch (kind) {
    case ForcingKind::zero:
        return make_forcing(grid);
    case ForcingKind::constant_x:
        return sample_forcing(
            grid, [amp](double, double) { return amp; },
            [](double, double) { return 0.0; }, [](double) { return 0.0; });
    case ForcingKind::gaussian_bump_x:
        return sample_forcing(
            grid,
            [=](double x, double y) {
                return amp * gaussian_bump(x, x0, sigma) * (1.0 + eta_wall(y));
            },
            [](double, double) { return 0.0; }, [](double) { return 0.0; });
    case ForcingKind::boundary_bump:
        return sample_forcing(
            grid, [](double, double) { return 0.0; },
            [](double, double) { return 0.0; },
            [=](double x) { return amp * gaussian_bump(x, x0, sigma); });
    }
    throw std::logic_error("make_template_forcing: unknown kind");
}

} // namespace slipchan
