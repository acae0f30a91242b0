#pragma once

/// @file constants.hpp
/// @brief Explicit functional-inequality constants: the boundary eigenvalue
/// mu(alpha) from mu cos mu + 8 alpha sin mu = 0, the norm-equivalence
/// constant Lambda, and the discrete Rayleigh-quotient eigenvalue on the
/// truncated strip.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "slipchan/grid.hpp"
#include "slipchan/linalg.hpp"

namespace slipchan {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

struct EigenResult {
    double mu = 0.0;        ///< smallest positive root in [pi/2, pi]
    double lambda_sq = 0.0; ///< mu^2
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double residual = 0.0;  ///< |mu cos mu + 8 a sin mu| / (1 + 8 a)
};

/// Smallest positive root of mu cos(mu) + 8 alpha sin(mu) = 0.
/// alpha = +inf is accepted as a sentinel (Dirichlet limit, mu = pi).
/// The residual is normalized by (1 + 8 alpha) so the 1e-12 contract is
/// uniform in alpha; the raw residual scales with the root's derivative and
/// is unattainable in double precision for large alpha.
inline EigenResult boundary_eigenvalue_mu(double alpha) {
    if (!(alpha >= 0.0))
        throw std::invalid_argument("boundary_eigenvalue_mu: alpha must be >= 0");
    EigenResult r;
    r.bracket_lo = 0.5 * kPi;
    r.bracket_hi = kPi;
    if (std::isinf(alpha)) {
        r.mu = kPi;
        r.lambda_sq = kPi * kPi;
        r.residual = std::abs(std::sin(kPi)); // normalized limit of f/(8 alpha)
        return r;
    }
    const double scale = 1.0 + 8.0 * alpha;
    auto f = [&](double mu) {
        return (mu * std::cos(mu) + 8.0 * alpha * std::sin(mu)) / scale;
    };
    auto fp = [&](double mu) {
        return (std::cos(mu) - mu * std::sin(mu) + 8.0 * alpha * std::cos(mu)) / scale;
    };
    double lo = r.bracket_lo, hi = r.bracket_hi;
    double flo = f(lo);
    for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double mu = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) { // Newton polish to machine residual
        const double d = fp(mu);
        if (d == 0.0) break;
        const double step = f(mu) / d;
        const double next = mu - step;
        if (next < r.bracket_lo || next > r.bracket_hi) break;
        mu = next;
    }
    r.mu = mu;
    r.lambda_sq = mu * mu;
    r.residual = std::abs(f(mu));
    return r;
}

/// Lambda(alpha, beta, L) = 32 L^2 / pi^2 + beta * min(1/alpha, 8L).
/// beta = 0 is accepted as the limit; alpha = +inf gives min = 0.
inline double capital_lambda(double alpha, double beta, double L) {
    if (!(alpha > 0.0) || !(beta >= 0.0) || !(L > 0.0))
        throw std::invalid_argument("capital_lambda: need alpha > 0, beta >= 0, L > 0");
    const double inv_alpha = std::isinf(alpha) ? 0.0 : 1.0 / alpha;
    return 32.0 * L * L / (kPi * kPi) + beta * std::min(inv_alpha, 8.0 * L);
}

// ---------------------------------------------------------------------------
// Discrete Rayleigh quotient on the truncated strip
// ---------------------------------------------------------------------------

struct DiscreteEigenResult {
    double lambda_sq = 0.0;
    int power_iterations = 0;
    bool converged = false;
};

/// Node-based scalar eigenproblem for the relaxed variational problem
///   min ( ||grad u||^2 + 8 alpha ||u||_Gamma^2 ) / ||u||^2
/// on (-n, n) x (0, 1) with u = 0 at y = 1 and x = +-n, Robin row at y = 0
/// (or a Dirichlet row when alpha = +inf). The assembled forms are exact
/// tensor products of the 1D x- and y-operators with trapezoid masses, which
/// the unit tests exploit as an independent oracle.
///
/// Solved by inverse power iteration (CG inner solves) starting from the
/// separated analytic ground state.
inline DiscreteEigenResult discrete_lambda_sq(double alpha, const Grid& grid,
                                              double tol = 1e-9, int max_power = 400) {
    if (grid.x_mode != XMode::dirichlet_ends)
        throw std::invalid_argument("discrete_lambda_sq: needs dirichlet_ends grid");
    if (grid.ny < 16)
        throw std::invalid_argument("discrete_lambda_sq: ny >= 16 required");
    const bool dirichlet_wall = std::isinf(alpha);
    const int nxn = grid.nx + 1, nyn = grid.ny + 1;
    const double dx = grid.dx, dy = grid.dy;
    auto idx = [&](int i, int j) { return static_cast<std::size_t>(j) * nxn + i; };
    const std::size_t n = static_cast<std::size_t>(nxn) * nyn;

    std::vector<char> free_node(n, 1);
    for (int j = 0; j < nyn; ++j) {
        free_node[idx(0, j)] = 0;
        free_node[idx(grid.nx, j)] = 0;
    }
    for (int i = 0; i < nxn; ++i) free_node[idx(i, grid.ny)] = 0;
    if (dirichlet_wall)
        for (int i = 0; i < nxn; ++i) free_node[idx(i, 0)] = 0;

    auto wx = [&](int i) { return (i == 0 || i == grid.nx) ? 0.5 : 1.0; };
    auto wy = [&](int j) { return (j == 0 || j == grid.ny) ? 0.5 : 1.0; };

    Vec mass(n, 0.0);
    for (int j = 0; j < nyn; ++j)
        for (int i = 0; i < nxn; ++i)
            if (free_node[idx(i, j)]) mass[idx(i, j)] = wx(i) * wy(j) * dx * dy;

    auto mask = [&](Vec& v) {
        for (std::size_t k = 0; k < n; ++k)
            if (!free_node[k]) v[k] = 0.0;
    };

    auto applyA = [&](const Vec& x, Vec& y) {
        std::fill(y.begin(), y.end(), 0.0);
        for (int j = 0; j < nyn; ++j) {
            const double row_w = wy(j) * dy;
            for (int i = 0; i < grid.nx; ++i) {
                const double d = (x[idx(i + 1, j)] - x[idx(i, j)]) / dx;
                const double t = row_w * dx * d / dx;
                y[idx(i + 1, j)] += t;
                y[idx(i, j)] -= t;
            }
        }
        for (int i = 0; i < nxn; ++i) {
            const double col_w = wx(i) * dx;
            for (int j = 0; j < grid.ny; ++j) {
                const double d = (x[idx(i, j + 1)] - x[idx(i, j)]) / dy;
                const double t = col_w * dy * d / dy;
                y[idx(i, j + 1)] += t;
                y[idx(i, j)] -= t;
            }
            if (!dirichlet_wall) y[idx(i, 0)] += 8.0 * alpha * x[idx(i, 0)] * col_w;
        }
        mask(y);
    };

    Vec diag(n, 0.0);
    for (int j = 0; j < nyn; ++j)
        for (int i = 0; i < nxn; ++i) {
            if (!free_node[idx(i, j)]) continue;
            double d = 0.0;
            d += wy(j) * dy * ((i > 0 ? 1.0 : 0.0) + (i < grid.nx ? 1.0 : 0.0)) / dx;
            d += wx(i) * dx * ((j > 0 ? 1.0 : 0.0) + (j < grid.ny ? 1.0 : 0.0)) / dy;
            if (!dirichlet_wall && j == 0) d += 8.0 * alpha * wx(i) * dx;
            diag[idx(i, j)] = d;
        }

    // separated analytic ground state as the starting vector
    const double mu_guess = dirichlet_wall
                                ? kPi
                                : [&] {
                                      // crude interior root estimate is enough
                                      double lo = 0.5 * kPi, hi = kPi;
                                      for (int it = 0; it < 60; ++it) {
                                          const double mid = 0.5 * (lo + hi);
                                          const double fm = mid * std::cos(mid) +
                                                            8.0 * alpha * std::sin(mid);
                                          if (fm > 0.0) lo = mid;
                                          else hi = mid;
                                      }
                                      return 0.5 * (lo + hi);
                                  }();
    Vec x(n, 0.0);
    for (int j = 0; j < nyn; ++j)
        for (int i = 0; i < nxn; ++i) {
            if (!free_node[idx(i, j)]) continue;
            const double yv = static_cast<double>(j) * dy;
            const double xv = -grid.n_trunc + i * dx;
            double Y;
            if (dirichlet_wall) Y = std::sin(mu_guess * (1.0 - yv));
            else if (alpha == 0.0) Y = std::cos(mu_guess * yv);
            else Y = std::sin(mu_guess * yv) + mu_guess / (8.0 * alpha) * std::cos(mu_guess * yv);
            const double X = std::cos(kPi * xv / (2.0 * grid.n_trunc));
            x[idx(i, j)] = X * Y;
        }

    Vec Ax(n), Mx(n), ynew(n);
    double lambda_prev = 0.0;
    DiscreteEigenResult res;
    for (int it = 0; it < max_power; ++it) {
        applyA(x, Ax);
        double xMx = 0.0, xAx = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            xMx += mass[k] * x[k] * x[k];
            xAx += Ax[k] * x[k];
        }
        const double lambda = xAx / xMx;
        res.power_iterations = it + 1;
        if (it > 0 && std::abs(lambda - lambda_prev) <= tol * std::abs(lambda)) {
            res.lambda_sq = lambda;
            res.converged = true;
            return res;
        }
        lambda_prev = lambda;
        for (std::size_t k = 0; k < n; ++k) Mx[k] = mass[k] * x[k];
        ynew.assign(n, 0.0);
        const CgResult cgr = cg_solve(applyA, diag, Mx, ynew, 1e-12, 20000);
        if (!cgr.converged)
            throw std::runtime_error("discrete_lambda_sq: inner CG did not converge");
        double nrm = 0.0;
        for (std::size_t k = 0; k < n; ++k) nrm += mass[k] * ynew[k] * ynew[k];
        nrm = std::sqrt(nrm);
        for (std::size_t k = 0; k < n; ++k) x[k] = ynew[k] / nrm;
    }
    res.lambda_sq = lambda_prev;
    res.converged = false;
    throw std::runtime_error("discrete_lambda_sq: eigensolver did not converge");
}

} // namespace slipchan
