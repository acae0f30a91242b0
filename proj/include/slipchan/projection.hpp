#pragma once

/// @file projection.hpp
/// @brief Incremental pressure projection on the MAC grid.
///
/// The predictor carries grad p^n, so the Poisson solve below produces the
/// pressure increment; at a steady state the increment vanishes and the
/// stepper's fixed point satisfies the unsplit coupled equations. Walls and
/// dirichlet ends get homogeneous Neumann conditions (no correction of
/// constrained faces), periodic mode wraps. The constant nullspace is removed
/// by mean projection inside CG. Only the face velocities are corrected; the
/// slip trace g evolves by the wall law alone.

#include <cmath>
#include <functional>

#include "slipchan/fields.hpp"
#include "slipchan/grid.hpp"
#include "slipchan/linalg.hpp"
#include "slipchan/norms.hpp"

namespace slipchan {

struct ProjectionResult {
    int cg_iterations = 0;
    double cg_rel_residual = 0.0;
    double div_after = 0.0;
    bool converged = false;
};

class PressureProjector {
public:
    PressureProjector(const Grid& grid, double tol_rel = 1e-12, int max_iter = 20000)
        : grid_(grid), tol_(tol_rel), max_iter_(max_iter) {
        build_diag();
    }

    /// Project the velocity of `s` to the discretely divergence-free space,
    /// fold the increment into s.p, and return the post-projection residual.
    ProjectionResult project(FlowState& s, double dt) {
        const Grid& gr = grid_;
        Vec rhs(gr.psize(), 0.0);
        const double vol = gr.dx * gr.dy;
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i) {
                const int ie = gr.periodic() ? gr.wu(i + 1) : i + 1;
                const double div =
                    (s.u[gr.uidx(ie, j)] - s.u[gr.uidx(i, j)]) / gr.dx +
                    (s.v[gr.vidx(i, j + 1)] - s.v[gr.vidx(i, j)]) / gr.dy;
                rhs[gr.pidx(i, j)] = -div * vol / dt;
            }

        auto apply = [this](const Vec& x, Vec& y) { neg_laplace(x, y); };
        auto demean = [](Vec& x) {
            double m = 0.0;
            for (double w : x) m += w;
            m /= static_cast<double>(x.size());
            for (double& w : x) w -= m;
        };

        Vec phi(gr.psize(), 0.0);
        const CgResult cgr =
            cg_solve(apply, diag_, rhs, phi, tol_, max_iter_, demean);

        // face corrections; g is untouched: the wall law carries no pressure
        // term, and a slip-trace correction would break the discrete energy
        // identity (the (grad p, u) pairing cancels against -(p, div u) only
        // over the face DOFs)
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.ucols(); ++i) {
                if (!gr.u_free(i, j)) continue;
                s.u[gr.uidx(i, j)] -= dt * gradx(phi, i, j);
            }
        for (int j = 1; j < gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i)
                s.v[gr.vidx(i, j)] -=
                    dt * (phi[gr.pidx(i, j)] - phi[gr.pidx(i, j - 1)]) / gr.dy;
        for (std::size_t k = 0; k < s.p.size(); ++k) s.p[k] += phi[k];

        ProjectionResult res;
        res.cg_iterations = cgr.iterations;
        res.cg_rel_residual = cgr.rel_residual;
        res.converged = cgr.converged;
        res.div_after = divergence_residual(gr, s);
        return res;
    }

private:
    /// d(phi)/dx at the u-face column i, pressure row j.
    double gradx(const Vec& phi, int i, int j) const {
        const Grid& gr = grid_;
        if (gr.periodic())
            return (phi[gr.pidx(gr.wv(i), j)] - phi[gr.pidx(gr.wv(i - 1), j)]) / gr.dx;
        return (phi[gr.pidx(i, j)] - phi[gr.pidx(i - 1, j)]) / gr.dx;
    }

    /// y = vol * (-Laplace) x with Neumann walls (finite-volume form).
    void neg_laplace(const Vec& x, Vec& y) const {
        const Grid& gr = grid_;
        const double cx = gr.dy / gr.dx, cy = gr.dx / gr.dy;
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i) {
                const double c = x[gr.pidx(i, j)];
                double acc = 0.0;
                if (gr.periodic()) {
                    acc += cx * (c - x[gr.pidx(gr.wv(i + 1), j)]);
                    acc += cx * (c - x[gr.pidx(gr.wv(i - 1), j)]);
                } else {
                    if (i + 1 < gr.nx) acc += cx * (c - x[gr.pidx(i + 1, j)]);
                    if (i - 1 >= 0) acc += cx * (c - x[gr.pidx(i - 1, j)]);
                }
                if (j + 1 < gr.ny) acc += cy * (c - x[gr.pidx(i, j + 1)]);
                if (j - 1 >= 0) acc += cy * (c - x[gr.pidx(i, j - 1)]);
                y[gr.pidx(i, j)] = acc;
            }
    }

    void build_diag() {
        const Grid& gr = grid_;
        diag_.assign(gr.psize(), 0.0);
        const double cx = gr.dy / gr.dx, cy = gr.dx / gr.dy;
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i) {
                double d = 0.0;
                if (gr.periodic()) d += 2.0 * cx;
                else d += cx * ((i + 1 < gr.nx ? 1 : 0) + (i - 1 >= 0 ? 1 : 0));
                d += cy * ((j + 1 < gr.ny ? 1 : 0) + (j - 1 >= 0 ? 1 : 0));
                diag_[gr.pidx(i, j)] = d;
            }
    }

    const Grid& grid_;
    double tol_;
    int max_iter_;
    Vec diag_;
};

} // namespace slipchan
