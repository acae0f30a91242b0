#pragma once

/// @file attractor.hpp
/// @brief Long-time machinery: energy-identity residuals, the absorbing
/// ball, N-trace estimation over evolving tangent families, and the
/// closed-form fractal-dimension bound.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "slipchan/constants.hpp"
#include "slipchan/fields.hpp"
#include "slipchan/norms.hpp"
#include "slipchan/params.hpp"
#include "slipchan/rng.hpp"
#include "slipchan/stepper.hpp"
#include "slipchan/tangent.hpp"

namespace slipchan {

inline constexpr double kKappaDirichlet = 0.28867513459481288225; ///< 1/(2 sqrt 3)

// ---------------------------------------------------------------------------
// Energy identity residual
// ---------------------------------------------------------------------------

struct EnergyResidualSeries {
    std::vector<double> t;
    std::vector<double> residual;
    double max_residual = 0.0;
};

/// Per-step residual |d/dt(||u||_H^2 / 2) + dissipation - forcing power|
/// extracted from a trajectory recorded at every-step cadence.
inline EnergyResidualSeries energy_residual(const Trajectory& traj) {
    EnergyResidualSeries out;
    for (std::size_t k = 1; k < traj.records.size(); ++k) {
        out.t.push_back(traj.records[k].t);
        out.residual.push_back(traj.records[k].energy_residual);
        out.max_residual = std::max(out.max_residual, traj.records[k].energy_residual);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Absorbing ball
// ---------------------------------------------------------------------------

struct AbsorbingBallReport {
    double r_theory = 0.0;     ///< (Lambda/2) ||(f,h)||_H
    double entry_time = -1.0;  ///< first sample inside (1+delta) r_theory; -1 if never
    int violations_after_entry = 0;
    bool monotone_outside = true; ///< h never grows while above (1+delta) r_theory
    bool entered = false;
};

inline AbsorbingBallReport absorbing_ball_check(const Trajectory& traj,
                                                double lambda_cap,
                                                double forcing_h_norm,
                                                double delta = 0.1) {
    AbsorbingBallReport rep;
    rep.r_theory = 0.5 * lambda_cap * forcing_h_norm;
    const double level = (1.0 + delta) * rep.r_theory;
    for (std::size_t k = 0; k < traj.records.size(); ++k) {
        const double h = traj.records[k].h_norm;
        if (!rep.entered && h <= level) {
            rep.entered = true;
            rep.entry_time = traj.records[k].t;
        } else if (rep.entered && h > level) {
            ++rep.violations_after_entry;
        }
        if (k + 1 < traj.records.size() && h > level) {
            if (traj.records[k + 1].h_norm > h * (1.0 + 1e-10) + 1e-14)
                rep.monotone_outside = false;
        }
    }
    return rep;
}

/// March until the trajectory is inside the absorbing ball, then continue for
/// five ball time-scales (Lambda each). The returned state stands in for "on
/// the attractor".
inline FlowState burn_to_attractor(Stepper& stepper, FlowState state,
                                   const Forcing& forcing, double lambda_cap,
                                   double max_time = 200.0) {
    const double fh = forcing.h_norm(stepper.grid(), stepper.beta());
    const double level = 1.1 * 0.5 * lambda_cap * fh;
    const double dt = stepper.config().dt;
    double t = 0.0;
    while (t < max_time) {
        const NormReport n =
            compute_norms(stepper.grid(), state, stepper.alpha(), stepper.beta());
        if (n.h_norm <= level) break;
        stepper.advance(state, forcing);
        t += dt;
    }
    if (t >= max_time)
        throw std::runtime_error("burn_to_attractor: absorbing ball not reached "
                                 "(under-resolved run?)");
    const double extra = 5.0 * lambda_cap;
    const long n_steps = std::lround(extra / dt);
    for (long k = 0; k < n_steps; ++k) stepper.advance(state, forcing);
    return state;
}

// ---------------------------------------------------------------------------
// Family strategies
// ---------------------------------------------------------------------------

enum class FamilyStrategy { random_stream, stokes_modes };

/// Leading modes of the discrete Stokes-with-slip operator: subspace inverse
/// iteration (CG solves with the linear viscous stiffness), divergence-free
/// projection, and a final Ritz rotation.
inline std::vector<FlowState> stokes_mode_family(const Grid& grid, double alpha,
                                                 double beta, int N,
                                                 std::uint64_t seed,
                                                 int rounds = 6) {
    Rng rng(seed);
    ViscousOperator A(grid, StressLaw::linear(1.0), SlipLaw::linear(1.0), alpha);
    const DofLayout& lay = A.layout();
    const Vec mass = lay.mass(beta);
    const Vec diag = A.diagonal();
    PressureProjector projector(grid, 1e-12, 20000);

    std::vector<FlowState> fields;
    for (int k = 0; k < N; ++k) fields.push_back(random_stream_state(grid, rng));
    auto apply = [&](const Vec& in, Vec& out) {
        std::fill(out.begin(), out.end(), 0.0);
        A.apply(in, out);
    };

    for (int round = 0; round < rounds; ++round) {
        TangentFamily fam = h_orthonormalize_half(grid, beta, std::move(fields));
        fields = std::move(fam.phis);
        for (FlowState& f : fields) {
            Vec x, b(lay.n, 0.0), y(lay.n, 0.0);
            lay.pack(f, x);
            for (std::size_t k2 = 0; k2 < lay.n; ++k2) b[k2] = mass[k2] * x[k2];
            lay.enforce(b);
            const CgResult r = cg_solve(apply, diag, b, y, 1e-11, 20000);
            if (!r.converged)
                throw std::runtime_error("stokes_mode_family: CG did not converge");
            lay.unpack(y, f);
            enforce_constraints(grid, f);
            projector.project(f, 1.0);
            f.p.assign(f.p.size(), 0.0);
        }
    }
    TangentFamily fam = h_orthonormalize_half(grid, beta, std::move(fields));
    fields = std::move(fam.phis);

    // Ritz rotation: with (phi_i, phi_j)_H = delta_ij / 2 the reduced problem
    // is eig(2 R), R_ij = a(phi_i, phi_j).
    std::vector<Vec> packed(N);
    std::vector<Vec> applied(N);
    for (int k = 0; k < N; ++k) {
        lay.pack(fields[k], packed[k]);
        applied[k].assign(lay.n, 0.0);
        A.apply(packed[k], applied[k]);
    }
    std::vector<double> R(static_cast<std::size_t>(N) * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            R[static_cast<std::size_t>(i) * N + j] = 2.0 * dot(applied[i], packed[j]);
    std::vector<double> evals, V;
    jacobi_eigen(R, N, evals, V);
    std::vector<FlowState> rotated;
    for (int k = 0; k < N; ++k) {
        FlowState acc = make_state(grid);
        for (int i = 0; i < N; ++i)
            axpy_state(V[static_cast<std::size_t>(i) * N + k], fields[i], acc);
        rotated.push_back(std::move(acc));
    }
    return rotated;
}

// ---------------------------------------------------------------------------
// N-trace estimation
// ---------------------------------------------------------------------------

struct TraceEstimate {
    int N = 0;
    double q_empirical = 0.0;
    double q_theory = 0.0; ///< -N/Lambda + 8 kappa Lambda ||(f,h)||_H^2
    double sigma = 0.0;    ///< block standard error of the time average
    FamilyStrategy strategy = FamilyStrategy::random_stream;
    int samples = 0;
};

/// Sum over the family of (L(t, u0) phi_j, phi_j)_H at one instant:
/// -(L phi, phi)_H = a(phi, phi) + ((phi . grad) u, phi); the (u . grad) phi
/// pairing vanishes identically under the skew-symmetric convection scheme.
inline double trace_sample(const Grid& grid, ViscousOperator& A,
                           const FlowState& base, const TangentFamily& fam,
                           ConvectionScheme scheme) {
    const DofLayout& lay = A.layout();
    Vec xb;
    lay.pack(base, xb);
    A.set_lagged(xb); // wall rows: alpha s1'(g_base); linear stress untouched
    double total = 0.0;
    Vec x, ax(lay.n);
    Vec cu, cv;
    const double vol = grid.dx * grid.dy;
    for (const FlowState& phi : fam.phis) {
        lay.pack(phi, x);
        std::fill(ax.begin(), ax.end(), 0.0);
        A.apply(x, ax);
        double a_form = dot(ax, x);
        convection(grid, scheme, phi, base, cu, cv);
        double conv = 0.0;
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.ucols(); ++i)
                if (grid.u_free(i, j))
                    conv += quad::u_col_weight(grid, i) * cu[grid.uidx(i, j)] *
                            phi.u[grid.uidx(i, j)] * vol;
        for (int j = 1; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i)
                conv += cv[grid.vidx(i, j)] * phi.v[grid.vidx(i, j)] * vol;
        total += -(a_form + conv);
    }
    return total;
}

/// Time-averaged N-trace along a trajectory started at u0 (assumed on/near
/// the attractor): evolves N tangent fields, re-orthonormalizes at every
/// sample time, and accumulates 2 <sum_j (L phi_j, phi_j)_H>_t. The result
/// is a lower estimate of the supremum in the trace formula.
inline TraceEstimate n_trace_estimate(const Grid& grid, double alpha, double beta,
                                      const StressLaw& stress, const SlipLaw& slip,
                                      const SolverConfig& cfg, const FlowState& u0,
                                      const Forcing& forcing, int N, double T_window,
                                      FamilyStrategy strategy, double kappa,
                                      std::uint64_t seed, int sample_every = 4) {
    if (N < 1) throw std::invalid_argument("n_trace_estimate: N >= 1");
    std::vector<FlowState> init;
    if (strategy == FamilyStrategy::random_stream) {
        Rng rng(seed);
        for (int k = 0; k < N; ++k) init.push_back(random_stream_state(grid, rng));
    } else {
        init = stokes_mode_family(grid, alpha, beta, N, seed);
    }
    for (FlowState& f : init) f.p.assign(f.p.size(), 0.0);
    TangentFamily fam = h_orthonormalize_half(grid, beta, std::move(init));

    Stepper base_stepper(grid, alpha, beta, stress, slip, cfg);
    TangentStepper tangent(grid, alpha, beta, stress, slip, cfg);
    ViscousOperator A(grid, stress, slip, alpha);

    const int n_steps = static_cast<int>(std::lround(T_window / cfg.dt));
    FlowState base = u0;
    std::vector<double> samples;
    samples.push_back(trace_sample(grid, A, base, fam, cfg.convection));
    for (int k = 0; k < n_steps; ++k) {
        const FlowState base_prev = base;
        base_stepper.advance(base, forcing);
        for (FlowState& phi : fam.phis) tangent.advance(phi, base_prev, base);
        if ((k + 1) % sample_every == 0 || k + 1 == n_steps) {
            fam = h_orthonormalize_half(grid, beta, std::move(fam.phis));
            samples.push_back(trace_sample(grid, A, base, fam, cfg.convection));
        }
    }

    TraceEstimate est;
    est.N = N;
    est.strategy = strategy;
    est.samples = static_cast<int>(samples.size());
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    est.q_empirical = 2.0 * mean;

    const int blocks = std::min<int>(10, static_cast<int>(samples.size()));
    if (blocks >= 2) {
        std::vector<double> bm(blocks, 0.0);
        std::vector<int> bc(blocks, 0);
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const int b = static_cast<int>(s * blocks / samples.size());
            bm[b] += samples[s];
            ++bc[b];
        }
        for (int b = 0; b < blocks; ++b) bm[b] /= std::max(1, bc[b]);
        double var = 0.0;
        for (int b = 0; b < blocks; ++b) var += (bm[b] - mean) * (bm[b] - mean);
        var /= (blocks - 1.0);
        est.sigma = 2.0 * std::sqrt(var / blocks);
    }

    const double lam = capital_lambda(alpha, beta, 1.0);
    const double fh2 = forcing.h_norm_sq(grid, beta);
    est.q_theory = -static_cast<double>(N) / lam + 8.0 * kappa * lam * fh2;
    return est;
}

// ---------------------------------------------------------------------------
// Dimension bound
// ---------------------------------------------------------------------------

struct DimensionBound {
    double kappa = kKappaDirichlet;
    double lambda_cap = 0.0;          ///< Lambda(alpha, beta, L), physical
    double forcing_h_norm = 0.0;      ///< ||(f,h)||_{H_L}
    double bound = 0.0;               ///< (8 kappa / nu^4) Lambda^2 ||(f,h)||^2
    double dirichlet_reference = 0.0; ///< (1/(4 sqrt3 nu^4)) (L^4/pi^4) ||f||^2
};

/// Closed-form fractal-dimension bound in physical variables. `f_l2_norm` is
/// the interior-force L2 norm entering the Dirichlet comparison value.
inline DimensionBound dimension_bound(const PhysicalParams& params, double kappa,
                                      double fh_norm, double f_l2_norm) {
    if (!(kappa > 0.0)) throw std::invalid_argument("dimension_bound: kappa > 0");
    params.validate();
    DimensionBound b;
    b.kappa = kappa;
    b.lambda_cap = capital_lambda(params.alpha, params.beta, params.L);
    b.forcing_h_norm = fh_norm;
    const double nu4 = std::pow(params.nu, 4);
    b.bound = 8.0 * kappa / nu4 * b.lambda_cap * b.lambda_cap * fh_norm * fh_norm;
    b.dirichlet_reference = 1.0 / (4.0 * std::sqrt(3.0) * nu4) *
                            std::pow(params.L, 4) / std::pow(kPi, 4) * f_l2_norm *
                            f_l2_norm;
    return b;
}

/// The same bound computed through the nondimensional route:
/// 8 kappa Lambda(alpha*, beta*, 1)^2 ||(f*,h*)||_H^2. Agrees with
/// dimension_bound() to floating-point roundoff.
inline double dimension_bound_scaled_route(const PhysicalParams& params,
                                           double kappa, double fh_norm) {
    const ScaledParams sp = nondimensionalize(params);
    const double lam_star = capital_lambda(sp.scaled.alpha, sp.scaled.beta, 1.0);
    const double fh2_star = sp.hnorm_sq_scale * fh_norm * fh_norm;
    return 8.0 * kappa * lam_star * lam_star * fh2_star;
}

/// beta = 0 variant (accepted as a limit; the H_L norm then carries no
/// boundary term, callers pass the plain ||f||_{L2} as fh_norm).
inline DimensionBound dimension_bound_beta0(double alpha, double nu, double L,
                                            double kappa, double f_l2_norm) {
    DimensionBound b;
    b.kappa = kappa;
    b.lambda_cap = capital_lambda(alpha, 0.0, L);
    b.forcing_h_norm = f_l2_norm;
    const double nu4 = std::pow(nu, 4);
    b.bound = 8.0 * kappa / nu4 * b.lambda_cap * b.lambda_cap * f_l2_norm * f_l2_norm;
    b.dirichlet_reference = 1.0 / (4.0 * std::sqrt(3.0) * nu4) * std::pow(L, 4) /
                            std::pow(kPi, 4) * f_l2_norm * f_l2_norm;
    return b;
}

} // namespace slipchan
