#pragma once

/// @file stepper.hpp
/// @brief IMEX projection time stepper for the channel system with the
/// dynamic slip wall, plus trajectory observers.
///
/// One step (theta-implicit diffusion, AB2 explicit convection, incremental
/// pressure projection):
///   M (x - x^n)/dt + theta R(x) + (1-theta) R(x^n) + M conv* + M grad p^n = F
///   pressure increment solve, face + slip-trace correction.
/// The wall DOF g advances inside the same implicit solve: its rows carry
/// beta g' + alpha s1(g) - [S(Du) n]_tau through the corner terms of R, so no
/// separate boundary integrator exists. Nonlinear laws get a Newton loop
/// whose Jacobian relags the quadrature coefficients each iteration.

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "slipchan/constitutive.hpp"
#include "slipchan/fields.hpp"
#include "slipchan/grid.hpp"
#include "slipchan/linalg.hpp"
#include "slipchan/norms.hpp"
#include "slipchan/operators.hpp"
#include "slipchan/projection.hpp"

namespace slipchan {

struct SolverConfig {
    double dt = 1e-2;
    double div_tol = 1e-8;
    ConvectionScheme convection = ConvectionScheme::skew_symmetric;
    double theta = 1.0; ///< 1 = backward Euler, 0.5 = Crank-Nicolson
    double lin_tol = 1e-12;
    int lin_maxit = 50000;
    double newton_tol = 1e-10;
    int newton_maxit = 20;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be positive");
        if (!(div_tol > 0.0)) throw std::invalid_argument("SolverConfig: div_tol must be positive");
        if (!(theta >= 0.5 && theta <= 1.0))
            throw std::invalid_argument("SolverConfig: theta must lie in [0.5, 1]");
    }
};

struct SolverError : std::runtime_error {
    double residual;
    SolverError(const std::string& what, double res)
        : std::runtime_error(what + " (residual " + format_residual(res) + ")"),
          residual(res) {}

private:
    static std::string format_residual(double r) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3e", r);
        return buf;
    }
};

class Stepper {
public:
    Stepper(const Grid& grid, double alpha, double beta, StressLaw stress,
            SlipLaw slip, SolverConfig cfg)
        : grid_(grid), alpha_(alpha), beta_(beta), cfg_(cfg),
          visc_(grid, stress, slip, alpha), layout_(visc_.layout()),
          projector_(grid, cfg.lin_tol, cfg.lin_maxit) {
        cfg_.validate();
        mass_ = layout_.mass(beta);
        all_linear_ = stress.is_linear() && slip.is_linear();
    }

    const Grid& grid() const { return grid_; }
    const DofLayout& layout() const { return layout_; }
    const ViscousOperator& viscous() const { return visc_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const SolverConfig& config() const { return cfg_; }

    /// Forget AB2 history (call when starting a new trajectory).
    void reset_history() { have_prev_ = false; }

    /// Advance the state by one dt in place.
    void advance(FlowState& s, const Forcing& f) {
        const double dt = cfg_.dt;
        const double th = cfg_.theta;

        Vec cu, cv;
        convection(grid_, cfg_.convection, s, s, cu, cv);

        Vec x0;
        layout_.pack(s, x0);

        // weighted right-hand side
        Vec rhs(layout_.n, 0.0);
        for (std::size_t k = 0; k < layout_.n; ++k) rhs[k] = mass_[k] * x0[k];
        if (th < 1.0) {
            Vec rv(layout_.n, 0.0);
            visc_.residual(x0, rv);
            axpy(-dt * (1.0 - th), rv, rhs);
        }
        add_explicit_terms(s, f, cu, cv, dt, rhs);
        layout_.enforce(rhs);

        // implicit viscous/slip solve (Newton; single pass for linear laws)
        Vec x = x0;
        Vec res(layout_.n), rv(layout_.n), delta(layout_.n);
        bool done = false;
        // residual threshold scales with the terms that cancel, not just the
        // right-hand side, so stiff (large dt theta A) solves do not trip on
        // recomputation roundoff
        auto res_scale = [&](const Vec& xx, const Vec& rr) {
            double mx = 0.0;
            for (std::size_t k = 0; k < layout_.n; ++k)
                mx += mass_[k] * xx[k] * mass_[k] * xx[k];
            return std::max(norm2(rhs), std::sqrt(mx) + dt * th * norm2(rr)) + 1e-300;
        };
        for (int it = 0; it < cfg_.newton_maxit; ++it) {
            visc_.residual(x, rv);
            for (std::size_t k = 0; k < layout_.n; ++k)
                res[k] = mass_[k] * x[k] + dt * th * rv[k] - rhs[k];
            layout_.enforce(res);
            if (norm2(res) <= cfg_.newton_tol * res_scale(x, rv)) {
                done = true;
                break;
            }
            visc_.set_lagged(x);
            Vec diag = visc_.diagonal();
            for (std::size_t k = 0; k < layout_.n; ++k)
                diag[k] = mass_[k] + dt * th * diag[k];
            auto apply = [&](const Vec& in, Vec& out) {
                std::fill(out.begin(), out.end(), 0.0);
                visc_.apply(in, out);
                for (std::size_t k = 0; k < layout_.n; ++k)
                    out[k] = mass_[k] * in[k] + dt * th * out[k];
                layout_.enforce(out);
            };
            delta.assign(layout_.n, 0.0);
            const CgResult cgr =
                cg_solve(apply, diag, res, delta, cfg_.lin_tol, cfg_.lin_maxit);
            if (!cgr.converged)
                throw SolverError("implicit viscous solve did not converge",
                                  cgr.rel_residual);
            for (std::size_t k = 0; k < layout_.n; ++k) x[k] -= delta[k];
            layout_.enforce(x);
            if (all_linear_) { // one linear solve is exact; verify next pass
                visc_.residual(x, rv);
                for (std::size_t k = 0; k < layout_.n; ++k)
                    res[k] = mass_[k] * x[k] + dt * th * rv[k] - rhs[k];
                layout_.enforce(res);
                done = norm2(res) <=
                       std::max(cfg_.newton_tol, 100.0 * cfg_.lin_tol) * res_scale(x, rv);
                break;
            }
        }
        if (!done) {
            visc_.residual(x, rv);
            Vec chk(layout_.n, 0.0);
            for (std::size_t k = 0; k < layout_.n; ++k)
                chk[k] = mass_[k] * x[k] + dt * th * rv[k] - rhs[k];
            layout_.enforce(chk);
            throw SolverError("boundary/viscous Newton did not converge",
                              norm2(chk) / res_scale(x, rv));
        }

        layout_.unpack(x, s);
        enforce_constraints(grid_, s);

        const ProjectionResult pr = projector_.project(s, dt);
        if (!pr.converged)
            throw SolverError("pressure solve did not converge", pr.cg_rel_residual);
        if (pr.div_after > cfg_.div_tol)
            throw SolverError("post-projection divergence above tolerance", pr.div_after);

        s.t += dt;
        prev_cu_ = cu;
        prev_cv_ = cv;
        have_prev_ = true;
    }

    /// Dissipation quadrature of the current state (exact laws).
    double dissipation(const FlowState& s) const {
        Vec x;
        layout_.pack(s, x);
        return visc_.dissipation(x);
    }

    /// ((f,h), u)_H with the grid quadrature.
    double forcing_power(const FlowState& s, const Forcing& f) const {
        const Grid& gr = grid_;
        double p = 0.0;
        const double vol = gr.dx * gr.dy;
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.ucols(); ++i)
                if (gr.u_free(i, j))
                    p += quad::u_col_weight(gr, i) * f.fu[gr.uidx(i, j)] * s.u[gr.uidx(i, j)] * vol;
        for (int j = 1; j < gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i)
                p += f.fv[gr.vidx(i, j)] * s.v[gr.vidx(i, j)] * vol;
        for (int i = 0; i < gr.ucols(); ++i)
            if (gr.g_free(i))
                p += beta_ * quad::u_col_weight(gr, i) * f.hg[i] * s.g[i] * gr.dx;
        return p;
    }

private:
    void add_explicit_terms(const FlowState& s, const Forcing& f, const Vec& cu,
                            const Vec& cv, double dt, Vec& rhs) {
        const Grid& gr = grid_;
        const double vol = gr.dx * gr.dy;
        const bool ab2 = have_prev_;
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.ucols(); ++i) {
                if (!gr.u_free(i, j)) continue;
                const std::size_t k = gr.uidx(i, j);
                const double conv =
                    ab2 ? 1.5 * cu[k] - 0.5 * prev_cu_[k] : cu[k];
                const double gp = gr.periodic()
                                      ? (s.p[gr.pidx(gr.wv(i), j)] - s.p[gr.pidx(gr.wv(i - 1), j)]) / gr.dx
                                      : (s.p[gr.pidx(i, j)] - s.p[gr.pidx(i - 1, j)]) / gr.dx;
                const double m = quad::u_col_weight(gr, i) * vol;
                rhs[layout_.ou + k] += dt * m * (f.fu[k] - conv - gp);
            }
        for (int j = 1; j < gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i) {
                const std::size_t k = gr.vidx(i, j);
                const double conv =
                    ab2 ? 1.5 * cv[k] - 0.5 * prev_cv_[k] : cv[k];
                const double gp = (s.p[gr.pidx(i, j)] - s.p[gr.pidx(i, j - 1)]) / gr.dy;
                rhs[layout_.ov + k] += dt * vol * (f.fv[k] - conv - gp);
            }
        for (int i = 0; i < gr.ucols(); ++i) {
            if (!gr.g_free(i)) continue;
            rhs[layout_.og + i] += dt * beta_ * quad::u_col_weight(gr, i) * gr.dx * f.hg[i];
        }
    }

    const Grid& grid_;
    double alpha_, beta_;
    SolverConfig cfg_;
    ViscousOperator visc_;
    DofLayout layout_;
    PressureProjector projector_;
    Vec mass_;
    Vec prev_cu_, prev_cv_;
    bool have_prev_ = false;
    bool all_linear_ = true;
};

/// One-shot step (forward-Euler convection start); returns the advanced state.
inline FlowState step(const FlowState& state, const Forcing& forcing,
                      const StressLaw& stress, const SlipLaw& slip, double alpha,
                      double beta, const Grid& grid, const SolverConfig& cfg) {
    Stepper st(grid, alpha, beta, stress, slip, cfg);
    FlowState out = state;
    st.advance(out, forcing);
    return out;
}

// ---------------------------------------------------------------------------
// Trajectories and observers
// ---------------------------------------------------------------------------

struct TrajectoryRecord {
    double t = 0.0;
    double h_norm = 0.0;
    double v_norm = 0.0;
    double div_residual = 0.0;
    double dissipation = 0.0;
    double forcing_power = 0.0;
    double energy_residual = 0.0; ///< |d/dt(h^2/2) + diss - power| for the step ending at t
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    std::vector<FlowState> snapshots; ///< sampled states (empty unless requested)
    std::vector<double> snapshot_times;
    FlowState final_state;
};

/// March `state` to t_end, recording every `record_every` steps (the energy
/// bookkeeping itself runs every step) and snapshotting every
/// `snapshot_every` steps (0 = never).
inline Trajectory run_to_time(Stepper& stepper, FlowState state,
                              const Forcing& forcing, double t_end,
                              int record_every = 1, int snapshot_every = 0) {
    if (t_end < state.t - 1e-14)
        throw std::invalid_argument("run_to_time: t_end must be >= state.t");
    Trajectory traj;
    const double dt = stepper.config().dt;
    const long n_steps = std::lround((t_end - state.t) / dt);
    double prev_h2 = 0.0;
    {
        const NormReport n0 = compute_norms(stepper.grid(), state, stepper.alpha(), stepper.beta());
        prev_h2 = n0.h_norm * n0.h_norm;
        TrajectoryRecord r;
        r.t = state.t;
        r.h_norm = n0.h_norm;
        r.v_norm = n0.v_norm;
        r.div_residual = divergence_residual(stepper.grid(), state);
        r.dissipation = stepper.dissipation(state);
        r.forcing_power = stepper.forcing_power(state, forcing);
        traj.records.push_back(r);
        if (snapshot_every > 0) {
            traj.snapshots.push_back(state);
            traj.snapshot_times.push_back(state.t);
        }
    }
    for (long k = 1; k <= n_steps; ++k) {
        stepper.advance(state, forcing);
        const NormReport n = compute_norms(stepper.grid(), state, stepper.alpha(), stepper.beta());
        const double h2 = n.h_norm * n.h_norm;
        const double diss = stepper.dissipation(state);
        const double power = stepper.forcing_power(state, forcing);
        const double resid = std::abs(0.5 * (h2 - prev_h2) / dt + diss - power);
        prev_h2 = h2;
        if (k % record_every == 0 || k == n_steps) {
            TrajectoryRecord r;
            r.t = state.t;
            r.h_norm = n.h_norm;
            r.v_norm = n.v_norm;
            r.div_residual = divergence_residual(stepper.grid(), state);
            r.dissipation = diss;
            r.forcing_power = power;
            r.energy_residual = resid;
            traj.records.push_back(r);
        }
        if (snapshot_every > 0 && (k % snapshot_every == 0 || k == n_steps)) {
            traj.snapshots.push_back(state);
            traj.snapshot_times.push_back(state.t);
        }
    }
    traj.final_state = std::move(state);
    return traj;
}

/// Difference energetics of two snapshot-bearing trajectories on one grid:
/// ||w(t)||_H^2 and the running integral of ||w||_V^2 for w = a - b.
struct DifferenceSeries {
    std::vector<double> times;
    std::vector<double> h_sq;
    std::vector<double> v_sq_integral;
};

inline DifferenceSeries difference_energy(const Grid& grid, double alpha,
                                          double beta, const Trajectory& a,
                                          const Trajectory& b) {
    if (a.snapshot_times.size() != b.snapshot_times.size())
        throw std::invalid_argument("difference_energy: trajectories have different sampling");
    DifferenceSeries out;
    double integral = 0.0;
    double prev_vsq = 0.0, prev_t = 0.0;
    for (std::size_t k = 0; k < a.snapshot_times.size(); ++k) {
        if (std::abs(a.snapshot_times[k] - b.snapshot_times[k]) > 1e-12)
            throw std::invalid_argument("difference_energy: timestamps do not match");
        const FlowState w = diff_state(a.snapshots[k], b.snapshots[k]);
        const NormReport n = compute_norms(grid, w, alpha, beta);
        const double vsq = n.v_norm * n.v_norm;
        if (k > 0) integral += 0.5 * (vsq + prev_vsq) * (a.snapshot_times[k] - prev_t);
        out.times.push_back(a.snapshot_times[k]);
        out.h_sq.push_back(n.h_norm * n.h_norm);
        out.v_sq_integral.push_back(integral);
        prev_vsq = vsq;
        prev_t = a.snapshot_times[k];
    }
    return out;
}

} // namespace slipchan
