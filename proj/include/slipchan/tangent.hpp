#pragma once

/// @file tangent.hpp
/// @brief Linearized (tangent) dynamics along a stored base trajectory,
/// H-orthonormalized families, and quasidifferentiability measurements.
///
/// The tangent system shares the IMEX projection scheme of the forward
/// solver: convection contributes N(u)U + N(U)u explicitly, the viscous part
/// is the same linear stiffness, and the wall rows carry alpha grad s(u_base)
/// as a per-node coefficient. The discrete tangent operator is exactly
/// linear, so superposition holds to solver tolerance.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "slipchan/constitutive.hpp"
#include "slipchan/fields.hpp"
#include "slipchan/grid.hpp"
#include "slipchan/norms.hpp"
#include "slipchan/operators.hpp"
#include "slipchan/projection.hpp"
#include "slipchan/stepper.hpp"

namespace slipchan {

/// Tangent state: (U, g_U, sigma); same layout as a flow state.
using TangentState = FlowState;

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

/// N admissible fields with (phi_i, phi_j)_H = 1/2 delta_ij.
struct TangentFamily {
    std::vector<FlowState> phis;
    int n() const { return static_cast<int>(phis.size()); }
};

/// Modified Gram-Schmidt (two passes) in the H inner product, then scale by
/// 1/sqrt(2). Throws on rank deficiency.
inline TangentFamily h_orthonormalize_half(const Grid& grid, double beta,
                                           std::vector<FlowState> fields) {
    const double inv_sqrt2 = 0.70710678118654752440;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t m = 0; m < k; ++m) {
                // previous vectors carry H-norm^2 = 1/2
                const double proj =
                    inner_h(grid, beta, fields[k], fields[m]) * 2.0;
                axpy_state(-proj, fields[m], fields[k]);
            }
        const double nrm = std::sqrt(inner_h(grid, beta, fields[k], fields[k]));
        if (!(nrm > 1e-10))
            throw std::runtime_error("h_orthonormalize_half: rank-deficient family");
        scale_state(fields[k], inv_sqrt2 / nrm);
    }
    TangentFamily fam;
    fam.phis = std::move(fields);
    return fam;
}

// ---------------------------------------------------------------------------
// Base trajectory storage
// ---------------------------------------------------------------------------

/// Every-step snapshots of a forward run, as the tangent stepper needs the
/// base state at both ends of each step.
struct BaseTrajectory {
    std::vector<FlowState> states; ///< states[k] at t0 + k dt
    double dt = 0.0;

    int steps() const { return static_cast<int>(states.size()) - 1; }
};

inline BaseTrajectory record_base_trajectory(Stepper& stepper, FlowState state,
                                             const Forcing& forcing, int n_steps) {
    BaseTrajectory traj;
    traj.dt = stepper.config().dt;
    traj.states.reserve(n_steps + 1);
    traj.states.push_back(state);
    for (int k = 0; k < n_steps; ++k) {
        stepper.advance(state, forcing);
        traj.states.push_back(state);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Tangent stepper
// ---------------------------------------------------------------------------

class TangentStepper {
public:
    TangentStepper(const Grid& grid, double alpha, double beta, StressLaw stress,
                   SlipLaw slip, SolverConfig cfg)
        : grid_(grid), alpha_(alpha), beta_(beta), cfg_(cfg), slip_(slip),
          visc_(grid, stress, slip, alpha), layout_(visc_.layout()),
          projector_(grid, cfg.lin_tol, cfg.lin_maxit) {
        if (!stress.is_linear())
            throw std::invalid_argument("TangentStepper: stress law must be linear");
        cfg_.validate();
        mass_ = layout_.mass(beta);
    }

    const Grid& grid() const { return grid_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const SolverConfig& config() const { return cfg_; }
    const ViscousOperator& viscous() const { return visc_; }

    void reset_history() { have_prev_ = false; }

    /// Advance U across [t_k, t_k + dt] given the base states at both ends.
    void advance(TangentState& U, const FlowState& base_n, const FlowState& base_np1) {
        const double dt = cfg_.dt;
        const double th = cfg_.theta;

        // linearized convection: N(u) U + N(U) u, explicit (AB2)
        Vec cu, cv, cu2, cv2;
        convection(grid_, cfg_.convection, base_n, U, cu, cv);
        convection(grid_, cfg_.convection, U, base_n, cu2, cv2);
        for (std::size_t k = 0; k < cu.size(); ++k) cu[k] += cu2[k];
        for (std::size_t k = 0; k < cv.size(); ++k) cv[k] += cv2[k];

        Vec x0;
        layout_.pack(U, x0);

        Vec rhs(layout_.n, 0.0);
        // explicit side with the wall coefficients frozen at base_n
        set_wall_coefficients(base_n);
        if (th < 1.0) {
            Vec ax(layout_.n, 0.0);
            visc_.apply(x0, ax);
            axpy(-dt * (1.0 - th), ax, rhs);
        }
        for (std::size_t k = 0; k < layout_.n; ++k) rhs[k] += mass_[k] * x0[k];

        const double vol = grid_.dx * grid_.dy;
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.ucols(); ++i) {
                if (!grid_.u_free(i, j)) continue;
                const std::size_t k = grid_.uidx(i, j);
                const double conv = have_prev_ ? 1.5 * cu[k] - 0.5 * prev_cu_[k] : cu[k];
                const double gp = grid_.periodic()
                                      ? (U.p[grid_.pidx(grid_.wv(i), j)] - U.p[grid_.pidx(grid_.wv(i - 1), j)]) / grid_.dx
                                      : (U.p[grid_.pidx(i, j)] - U.p[grid_.pidx(i - 1, j)]) / grid_.dx;
                rhs[layout_.ou + k] -= dt * quad::u_col_weight(grid_, i) * vol * (conv + gp);
            }
        for (int j = 1; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i) {
                const std::size_t k = grid_.vidx(i, j);
                const double conv = have_prev_ ? 1.5 * cv[k] - 0.5 * prev_cv_[k] : cv[k];
                const double gp = (U.p[grid_.pidx(i, j)] - U.p[grid_.pidx(i, j - 1)]) / grid_.dy;
                rhs[layout_.ov + k] -= dt * vol * (conv + gp);
            }
        layout_.enforce(rhs);

        // implicit solve with the wall coefficients at base_np1
        set_wall_coefficients(base_np1);
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
        Vec x(layout_.n, 0.0);
        const CgResult cgr = cg_solve(apply, diag, rhs, x, cfg_.lin_tol, cfg_.lin_maxit);
        if (!cgr.converged)
            throw SolverError("tangent viscous solve did not converge", cgr.rel_residual);

        layout_.unpack(x, U);
        enforce_constraints(grid_, U);
        const ProjectionResult pr = projector_.project(U, dt);
        if (!pr.converged)
            throw SolverError("tangent pressure solve did not converge", pr.cg_rel_residual);
        U.t += dt;
        prev_cu_ = cu;
        prev_cv_ = cv;
        have_prev_ = true;
    }

    /// March U along a stored base trajectory from step k0 to step k1.
    void advance_along(TangentState& U, const BaseTrajectory& base, int k0, int k1) {
        for (int k = k0; k < k1; ++k) advance(U, base.states[k], base.states[k + 1]);
    }

private:
    void set_wall_coefficients(const FlowState& base) {
        Vec xb;
        layout_.pack(base, xb);
        visc_.set_lagged(xb); // linear stress keeps constant coefficients;
                              // the slip rows pick up alpha s1'(g_base)
    }

    const Grid& grid_;
    double alpha_, beta_;
    SolverConfig cfg_;
    SlipLaw slip_;
    ViscousOperator visc_;
    DofLayout layout_;
    PressureProjector projector_;
    Vec mass_;
    Vec prev_cu_, prev_cv_;
    bool have_prev_ = false;
};

// ---------------------------------------------------------------------------
// Quasidifferentiability
// ---------------------------------------------------------------------------

struct QuasidiffReport {
    std::vector<double> epsilons;
    std::vector<double> remainder;      ///< e(eps) = ||S(T)(u0+eps d) - S(T)u0 - U_eps(T)||_H
    std::vector<double> remainder_rate; ///< e(eps)/eps
    bool monotone_decreasing = false;
};

/// Measure the linearization remainder across a list of decreasing epsilons.
/// The tangent is computed once from direction d and scaled (the discrete
/// tangent operator is exactly linear).
inline QuasidiffReport quasidiff_ratios(const Grid& grid, double alpha, double beta,
                                        const StressLaw& stress, const SlipLaw& slip,
                                        const SolverConfig& cfg, const FlowState& u0,
                                        const FlowState& direction,
                                        const std::vector<double>& epsilons,
                                        double T, const Forcing& forcing) {
    if (epsilons.empty())
        throw std::invalid_argument("quasidiff_ratios: need at least one epsilon");
    for (std::size_t k = 1; k < epsilons.size(); ++k)
        if (!(epsilons[k] < epsilons[k - 1]))
            throw std::invalid_argument("quasidiff_ratios: epsilons must decrease");

    const int n_steps = static_cast<int>(std::lround(T / cfg.dt));
    Stepper base_stepper(grid, alpha, beta, stress, slip, cfg);
    const BaseTrajectory base =
        record_base_trajectory(base_stepper, u0, forcing, n_steps);

    TangentStepper tst(grid, alpha, beta, stress, slip, cfg);
    TangentState U = direction;
    U.p.assign(U.p.size(), 0.0);
    tst.advance_along(U, base, 0, n_steps);

    QuasidiffReport rep;
    rep.epsilons = epsilons;
    for (double eps : epsilons) {
        FlowState pert = u0;
        axpy_state(eps, direction, pert);
        Stepper st(grid, alpha, beta, stress, slip, cfg);
        FlowState end = pert;
        for (int k = 0; k < n_steps; ++k) st.advance(end, forcing);
        // e = || end - base_end - eps U ||_H
        FlowState diff = diff_state(end, base.states.back());
        axpy_state(-eps, U, diff);
        const NormReport nr = compute_norms(grid, diff, alpha, beta);
        rep.remainder.push_back(nr.h_norm);
        rep.remainder_rate.push_back(nr.h_norm / eps);
    }
    rep.monotone_decreasing = true;
    for (std::size_t k = 1; k < rep.remainder_rate.size(); ++k)
        if (rep.remainder_rate[k] > rep.remainder_rate[k - 1]) rep.monotone_decreasing = false;
    return rep;
}

} // namespace slipchan
