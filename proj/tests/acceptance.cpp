/// @file acceptance.cpp
/// @brief Integration acceptance suite. Each criterion runs at its stated
/// tolerance and prints exactly one PASS/FAIL line; the exit code is the
/// number of failed criteria. Run all, or select with --criterion N.
///
/// Criterion 1 compares against the published eigenvalue table verbatim.
/// Its alpha = 0.1 entry (1.956) is inconsistent with the defining equation
/// mu cos mu + 8 alpha sin mu = 0 (the root there is 1.9585747, and the
/// equation residual at 1.956 is 3.2e-3, far above the 1e-12 residual the
/// solver achieves), so that entry fails by 2.1e-3 with a correct solver;
/// the line reports the discrepancy explicitly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstring>
#include <string>
#include <vector>

#include "slipchan/attractor.hpp"
#include "slipchan/config.hpp"
#include "slipchan/constants.hpp"
#include "slipchan/harness.hpp"
#include "slipchan/inequalities.hpp"
#include "slipchan/norms.hpp"
#include "slipchan/stepper.hpp"
#include "slipchan/tangent.hpp"

using namespace slipchan;

namespace {

struct Criterion {
    int id;
    std::string label;
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& why) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += why;
        }
    }
    void note(const std::string& info) {
        if (!detail.empty()) detail += "; ";
        detail += info;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

Forcing unit_norm_bump(const Grid& grid, double beta, double sigma = 0.4) {
    Forcing f = make_template_forcing(grid, ForcingKind::gaussian_bump_x, 1.0, 0.0, sigma);
    const double nrm = f.h_norm(grid, beta);
    for (auto& w : f.fu) w /= nrm;
    for (auto& w : f.fv) w /= nrm;
    for (auto& w : f.hg) w /= nrm;
    return f;
}

// --------------------------------------------------------------------------
// 1. published eigenvalue table at 5e-4 absolute, < 1 ms per root
// --------------------------------------------------------------------------
Criterion criterion1() {
    Criterion c{1, "mu-table reproduction (published values, 5e-4 absolute)", true, ""};
    struct Entry { double alpha, published; };
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<Entry> table = {{0.0, 0.5 * kPi},
                                      {0.1, 1.956},
                                      {1.0, 2.804},
                                      {10.0, 3.103},
                                      {inf, kPi}};
    for (const Entry& e : table) {
        const auto t0 = std::chrono::steady_clock::now();
        const EigenResult r = boundary_eigenvalue_mu(e.alpha);
        const double dt_ms = 1e3 * seconds_since(t0);
        const double dev = std::abs(r.mu - e.published);
        if (dev > 5e-4) {
            const double fpub = std::isinf(e.alpha)
                                    ? std::sin(e.published)
                                    : e.published * std::cos(e.published) +
                                          8.0 * e.alpha * std::sin(e.published);
            c.require(false,
                      fmt("alpha=%g: computed root %.7f (equation residual %.1e) vs "
                          "published %.4g, |diff| = %.2e > 5e-4; the published entry is "
                          "not a root (its equation residual is %.2e)",
                          e.alpha, r.mu, r.residual, e.published, dev, std::abs(fpub)));
        }
        c.require(r.residual <= 1e-12, fmt("alpha=%g: residual %.2e", e.alpha, r.residual));
        c.require(dt_ms < 1.0, fmt("alpha=%g: runtime %.3f ms", e.alpha, dt_ms));
    }
    return c;
}

// --------------------------------------------------------------------------
// 2. discrete eigenvalue on n_trunc = 8, ny = 64 within 2% of mu^2, < 30 s
// --------------------------------------------------------------------------
Criterion criterion2() {
    Criterion c{2, "discrete eigenvalue consistency (2% of mu^2, < 30 s)", true, ""};
    const auto t0 = std::chrono::steady_clock::now();
    const Grid grid = build_grid(8, 256, 64); // dx = 1/16
    for (double alpha : {0.0, 0.1, 1.0, 10.0, 1e6}) {
        const DiscreteEigenResult res = discrete_lambda_sq(alpha, grid);
        const double mu2 = boundary_eigenvalue_mu(alpha).lambda_sq;
        const double rel = std::abs(res.lambda_sq - mu2) / mu2;
        c.require(res.converged, fmt("alpha=%g: eigensolver did not converge", alpha));
        c.require(rel <= 0.02,
                  fmt("alpha=%g: lambda^2=%.5f vs mu^2=%.5f (rel %.4f)", alpha,
                      res.lambda_sq, mu2, rel));
    }
    const double el = seconds_since(t0);
    c.require(el < 30.0, fmt("runtime %.1f s", el));
    c.note(fmt("runtime %.2f s", el));
    return c;
}

// --------------------------------------------------------------------------
// 3. slip-Poiseuille steady oracle, sup error <= 4/ny^2, order >= 1.8, < 1 min
// --------------------------------------------------------------------------
FlowState steady_periodic(int ny, double alpha, double& sup_err, double* gerr = nullptr) {
    const Grid g = build_grid(1, 4, ny, XMode::periodic);
    SolverConfig cfg;
    cfg.dt = 0.2;
    Stepper st(g, alpha, 1.0, StressLaw::linear(1.0), SlipLaw::linear(1.0), cfg);
    const Forcing f = make_template_forcing(g, ForcingKind::constant_x);
    FlowState s = make_state(g);
    for (int k = 0; k < 2000; ++k) {
        const FlowState prev = s;
        st.advance(s, f);
        double d = 0.0;
        for (std::size_t i = 0; i < s.u.size(); ++i)
            d = std::max(d, std::abs(s.u[i] - prev.u[i]));
        if (d / cfg.dt < 1e-13) break;
    }
    sup_err = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.yu(j);
        const double exact = -0.5 * y * y + y / 3.0 + 1.0 / 6.0;
        sup_err = std::max(sup_err, std::abs(s.u[g.uidx(0, j)] - exact));
    }
    if (gerr) {
        *gerr = 0.0;
        for (int i = 0; i < g.ucols(); ++i)
            *gerr = std::max(*gerr, std::abs(s.g[i] - 1.0 / 6.0));
    }
    return s;
}

Criterion criterion3() {
    Criterion c{3, "slip-Poiseuille oracle (sup error <= 4/ny^2, order >= 1.8)", true, ""};
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> errs;
    for (int ny : {16, 32, 64}) {
        double sup = 0.0, gerr = 0.0;
        steady_periodic(ny, 1.0, sup, &gerr);
        errs.push_back(sup);
        c.require(sup <= 4.0 / (double(ny) * ny),
                  fmt("ny=%d: sup %.3e > %.3e", ny, sup, 4.0 / (double(ny) * ny)));
        c.require(gerr <= 1e-8, fmt("ny=%d: slip velocity error %.2e", ny, gerr));
    }
    const double ord1 = std::log2(errs[0] / errs[1]);
    const double ord2 = std::log2(errs[1] / errs[2]);
    c.require(ord1 >= 1.8 && ord2 >= 1.8, fmt("orders %.2f, %.2f", ord1, ord2));
    c.note(fmt("errors %.2e / %.2e / %.2e, orders %.2f, %.2f", errs[0], errs[1],
               errs[2], ord1, ord2));
    const double el = seconds_since(t0);
    c.require(el < 60.0, fmt("runtime %.1f s", el));
    return c;
}

// --------------------------------------------------------------------------
// 4. alpha -> infinity limit: Poiseuille within 1e-3
// --------------------------------------------------------------------------
Criterion criterion4() {
    Criterion c{4, "no-slip limit (alpha = 1e6 vs Poiseuille, 1e-3 sup)", true, ""};
    const int ny = 32;
    const Grid g = build_grid(1, 4, ny, XMode::periodic);
    SolverConfig cfg;
    cfg.dt = 0.2;
    Stepper st(g, 1e6, 1.0, StressLaw::linear(1.0), SlipLaw::linear(1.0), cfg);
    const Forcing f = make_template_forcing(g, ForcingKind::constant_x);
    FlowState s = make_state(g);
    for (int k = 0; k < 2000; ++k) {
        const FlowState prev = s;
        st.advance(s, f);
        double d = 0.0;
        for (std::size_t i = 0; i < s.u.size(); ++i)
            d = std::max(d, std::abs(s.u[i] - prev.u[i]));
        if (d / cfg.dt < 1e-13) break;
    }
    double sup = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.yu(j);
        sup = std::max(sup, std::abs(s.u[g.uidx(0, j)] - 0.5 * y * (1.0 - y)));
    }
    for (int i = 0; i < g.ucols(); ++i) sup = std::max(sup, std::abs(s.g[i]));
    c.require(sup < 1e-3, fmt("sup deviation %.3e", sup));
    c.note(fmt("sup deviation %.3e", sup));
    return c;
}

// --------------------------------------------------------------------------
// 5. energy identity: residual halves with dt; exactly zero on the zero run
// --------------------------------------------------------------------------
Criterion criterion5() {
    Criterion c{5, "energy identity (residual ratio >= 1.8; exact zero at rest)", true, ""};
    const Grid g = build_grid(1, 24, 12);
    const StressLaw stress = StressLaw::linear(1.0);
    const SlipLaw slip = SlipLaw::linear(1.0);
    {
        SolverConfig cfg;
        cfg.dt = 5e-3;
        Stepper st(g, 1.0, 1.0, stress, slip, cfg);
        const Trajectory traj = run_to_time(st, make_state(g), make_forcing(g), 0.05, 1);
        for (const auto& r : traj.records)
            c.require(r.energy_residual == 0.0, "zero solution has nonzero residual");
    }
    Rng rng(2024);
    const FlowState s0 = random_stream_state(g, rng);
    auto max_resid = [&](double dt) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.theta = 1.0;
        Stepper st(g, 1.0, 1.0, stress, slip, cfg);
        const Trajectory traj = run_to_time(st, s0, make_forcing(g), 0.12, 1);
        double m = 0.0;
        for (const auto& r : traj.records)
            if (r.t >= 0.03) m = std::max(m, r.energy_residual);
        return m;
    };
    const double r1 = max_resid(4e-3);
    const double r2 = max_resid(2e-3);
    c.require(r1 / r2 >= 1.8, fmt("ratio %.3f < 1.8", r1 / r2));
    c.note(fmt("residual ratio %.2f (order %.2f)", r1 / r2, std::log2(r1 / r2)));
    return c;
}

// --------------------------------------------------------------------------
// 6. inequality suites over >= 200 fields, zero violations, < 2 min
// --------------------------------------------------------------------------
Criterion criterion6() {
    Criterion c{6, "inequality suites (>= 200 fields, zero violations)", true, ""};
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g = build_grid(3, 48, 16);
    const int n_fields = 200;
    const auto korn = verify_korn_suite(1.0, 1.0, g, n_fields, 20240);
    for (const auto& r : korn)
        c.require(r.pass, fmt("%s: worst %.4f > %.4f", r.name.c_str(),
                              r.worst_observed_ratio, r.analytic_constant));
    const auto lady = verify_ladyzhenskaya(g, 1.0, n_fields, 31);
    c.require(lady.pass, fmt("ladyzhenskaya worst %.4f > %.4f",
                             lady.worst_observed_ratio, lady.analytic_constant));
    Rng rng(77);
    for (int trial = 0; trial < 4; ++trial) {
        std::vector<FlowState> fields;
        for (int k = 0; k < 8; ++k) fields.push_back(random_stream_state(g, rng));
        const TangentFamily fam = h_orthonormalize_half(g, 1.0, std::move(fields));
        const auto sub = verify_suborthonormal(g, 1.0, fam, 200, 100 + trial);
        c.require(sub.pass, fmt("suborthonormal trial %d: worst form %.6f", trial,
                                sub.worst_quadratic_form));
    }
    const double el = seconds_since(t0);
    c.require(el < 120.0, fmt("runtime %.1f s", el));
    c.note(fmt("runtime %.1f s over %d fields", el, n_fields));
    return c;
}

// --------------------------------------------------------------------------
// 7. absorbing ball for three (alpha, beta) configs, < 10 min
// --------------------------------------------------------------------------
Criterion criterion7() {
    Criterion c{7, "absorbing ball entry and confinement (three configs)", true, ""};
    const auto t0 = std::chrono::steady_clock::now();
    struct Cfg { double alpha, beta; };
    for (const Cfg pc : {Cfg{1.0, 1.0}, Cfg{0.1, 1.0}, Cfg{1.0, 0.01}}) {
        const Grid g = build_grid(2, 48, 12);
        SolverConfig cfg;
        cfg.dt = 2e-3;
        const double lam = capital_lambda(pc.alpha, pc.beta, 1.0);
        const double R = 0.5 * lam;
        Forcing f = unit_norm_bump(g, pc.beta);
        Stepper st(g, pc.alpha, pc.beta, StressLaw::linear(1.0), SlipLaw::linear(1.0), cfg);
        // start outside the ball: scaled admissible field at 2 R
        Rng rng(55);
        FlowState s0 = random_stream_state(g, rng);
        const NormReport n0 = compute_norms(g, s0, pc.alpha, pc.beta);
        scale_state(s0, 2.0 * R / n0.h_norm);
        const double T = 2.2 * lam + 3.0;
        const Trajectory traj = run_to_time(st, std::move(s0), f, T, 5);
        const AbsorbingBallReport rep = absorbing_ball_check(traj, lam, 1.0);
        c.require(rep.entered, fmt("(%g, %g): never entered 1.1 R = %.3f within T = %.1f",
                                   pc.alpha, pc.beta, 1.1 * rep.r_theory, T));
        c.require(rep.violations_after_entry == 0,
                  fmt("(%g, %g): %d excursions after entry", pc.alpha, pc.beta,
                      rep.violations_after_entry));
        c.require(rep.monotone_outside,
                  fmt("(%g, %g): H-norm grew outside the ball", pc.alpha, pc.beta));
        if (rep.entered)
            c.note(fmt("(%g,%g): R=%.2f entry t=%.2f", pc.alpha, pc.beta, rep.r_theory,
                       rep.entry_time));
    }
    const double el = seconds_since(t0);
    c.require(el < 600.0, fmt("runtime %.1f s", el));
    c.note(fmt("runtime %.1f s", el));
    return c;
}

// --------------------------------------------------------------------------
// 8. quasidifferentiability: decade decay of e(eps)/eps; exact-linear zero
// --------------------------------------------------------------------------
Criterion criterion8() {
    Criterion c{8, "quasidifferentiability (rate decay and exact-linear zero)", true, ""};
    const Grid g = build_grid(1, 24, 12);
    const StressLaw stress = StressLaw::linear(1.0);
    const SlipLaw slip = SlipLaw::linear(1.0);
    Rng rng(321);
    const FlowState u0 = random_stream_state(g, rng);
    FlowState dir = random_stream_state(g, rng);
    const NormReport nd = compute_norms(g, dir, 1.0, 1.0);
    scale_state(dir, 1.0 / nd.h_norm);
    const Forcing f0 = make_forcing(g);

    SolverConfig cfg;
    cfg.dt = 3e-3;
    const auto rep = quasidiff_ratios(g, 1.0, 1.0, stress, slip, cfg, u0, dir,
                                      {1e-1, 1e-2, 1e-3}, 0.15, f0);
    c.require(rep.monotone_decreasing, "e(eps)/eps not monotone");
    c.require(rep.remainder_rate[2] <= 0.1 * rep.remainder_rate[0],
              fmt("final rate %.3e > 0.1 x initial %.3e", rep.remainder_rate[2],
                  rep.remainder_rate[0]));
    c.note(fmt("rates %.2e -> %.2e -> %.2e", rep.remainder_rate[0],
               rep.remainder_rate[1], rep.remainder_rate[2]));

    SolverConfig off = cfg;
    off.convection = ConvectionScheme::off;
    const auto lin = quasidiff_ratios(g, 1.0, 1.0, stress, slip, off, u0, dir,
                                      {1e-1, 1e-2, 1e-3}, 0.15, f0);
    for (double e : lin.remainder)
        c.require(e <= 1e-9, fmt("linear remainder %.2e > 1e-9", e));
    return c;
}

// --------------------------------------------------------------------------
// 9. N-trace vs theory for N in {4, 8, 16, 32}, both strategies, < 20 min
// --------------------------------------------------------------------------
Criterion criterion9() {
    Criterion c{9, "N-trace vs theory (both strategies; zero-base bound)", true, ""};
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g = build_grid(2, 48, 12);
    SolverConfig cfg;
    cfg.dt = 4e-3;
    const StressLaw stress = StressLaw::linear(1.0);
    const SlipLaw slip = SlipLaw::linear(1.0);
    const double kappa = kKappaDirichlet;
    const double lam = capital_lambda(1.0, 1.0, 1.0);

    Forcing f = unit_norm_bump(g, 1.0);
    Stepper st(g, 1.0, 1.0, stress, slip, cfg);
    const FlowState u0 = burn_to_attractor(st, make_state(g), f, lam, 300.0);

    for (int N : {4, 8, 16, 32})
        for (FamilyStrategy strat :
             {FamilyStrategy::random_stream, FamilyStrategy::stokes_modes}) {
            const TraceEstimate est = n_trace_estimate(g, 1.0, 1.0, stress, slip, cfg,
                                                       u0, f, N, 4.0, strat, kappa,
                                                       900 + N, 4);
            const char* sname = strat == FamilyStrategy::random_stream ? "random" : "stokes";
            c.require(est.q_empirical <= est.q_theory + 3.0 * est.sigma,
                      fmt("N=%d %s: q_emp %.3f > q_theory %.3f + 3 sigma %.3f", N, sname,
                          est.q_empirical, est.q_theory, 3.0 * est.sigma));
        }

    // zero-base: q_N <= -N/Lambda with no sampling allowance
    for (int N : {4, 8, 16, 32}) {
        const TraceEstimate est = n_trace_estimate(
            g, 1.0, 1.0, stress, slip, cfg, make_state(g), make_forcing(g), N, 0.4,
            FamilyStrategy::random_stream, kappa, 1300 + N, 4);
        c.require(est.q_empirical <= -double(N) / lam,
                  fmt("zero base N=%d: q_emp %.3f > -N/Lambda %.3f", N, est.q_empirical,
                      -double(N) / lam));
    }
    const double el = seconds_since(t0);
    c.require(el < 1200.0, fmt("runtime %.1f s", el));
    c.note(fmt("runtime %.1f s", el));
    return c;
}

// --------------------------------------------------------------------------
// 10. dimension-formula properties and reference values
// --------------------------------------------------------------------------
Criterion criterion10() {
    Criterion c{10, "dimension bound: limits, monotonicity, reference values", true, ""};
    const double kappa = kKappaDirichlet;
    // reference 24.28 at nu = 1, L = 1, beta -> 0, unit forcing
    const DimensionBound ref = dimension_bound_beta0(1.0, 1.0, 1.0, kappa, 1.0);
    c.require(std::abs(ref.bound - 24.28) <= 0.005,
              fmt("beta->0 bound %.6f vs 24.28", ref.bound));
    c.require(std::abs(ref.dirichlet_reference - 1.482e-3) <= 5e-7,
              fmt("dirichlet reference %.6e vs 1.482e-3", ref.dirichlet_reference));
    // beta = 0 equals the alpha -> infinity formula (interior forcing)
    PhysicalParams pinf;
    pinf.alpha = std::numeric_limits<double>::infinity();
    pinf.beta = 2.0;
    const DimensionBound binf = dimension_bound(pinf, kappa, 1.0, 1.0);
    c.require(std::abs(ref.bound - binf.bound) <= 1e-13 * ref.bound,
              "beta=0 and alpha->infinity bounds differ");
    // nondecreasing in beta and divergence at beta = 1e4
    PhysicalParams p;
    double prev = 0.0;
    for (double b : {1e-6, 1e-3, 1.0, 1e2, 1e4}) {
        p.beta = b;
        const double v = dimension_bound(p, kappa, 1.0, 1.0).bound;
        c.require(v >= prev, fmt("bound decreased at beta=%g", b));
        prev = v;
    }
    p.beta = 1e4;
    const double big = dimension_bound(p, kappa, 1.0, 1.0).bound;
    p.beta = 1.0;
    const double base = dimension_bound(p, kappa, 1.0, 1.0).bound;
    c.require(big > 1e3 * base, fmt("beta=1e4 bound only %.1fx baseline", big / base));
    // nondimensional round trip
    PhysicalParams q{0.7, 2.3, 0.6, 1.7, 1.0};
    const double direct = dimension_bound(q, kappa, 1.9, 1.9).bound;
    const double scaled = dimension_bound_scaled_route(q, kappa, 1.9);
    c.require(std::abs(direct - scaled) <= 1e-12 * direct,
              fmt("round trip relative deviation %.2e", std::abs(direct - scaled) / direct));
    c.note(fmt("bound(beta->0)=%.4f, dirichlet=%.4e, explosion factor %.1e", ref.bound,
               ref.dirichlet_reference, big / base));
    return c;
}

// --------------------------------------------------------------------------
// 11. exhaustion: strictly decreasing truncation errors, < 15 min
// --------------------------------------------------------------------------
Criterion criterion11() {
    Criterion c{11, "domain exhaustion (strictly decreasing errors)", true, ""};
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg;
    cfg.n_trunc = 4;
    cfg.nx = 64; // dx = 1/8 held fixed across truncations
    cfg.ny = 16;
    cfg.T = 4.0;
    cfg.dt = 5e-3;
    cfg.forcing = "gaussian_bump";
    cfg.f_sigma = 0.75;
    cfg.cadence = 10;
    const ExhaustionReport rep = run_exhaustion(cfg, {4, 8, 16, 32});
    c.require(rep.errors.size() == 4, "unexpected report size");
    for (int k = 0; k < 2; ++k)
        c.require(rep.errors[k] > rep.errors[k + 1] * (1.0 + 1e-9),
                  fmt("e(%d) = %.3e not > e(%d) = %.3e", rep.n_list[k], rep.errors[k],
                      rep.n_list[k + 1], rep.errors[k + 1]));
    c.require(rep.errors[2] > 0.0, "e(16) vanished (truncation effect unresolved)");
    c.require(rep.errors[3] == 0.0, "reference error must be zero");
    c.note(fmt("e = %.3e / %.3e / %.3e (runtime %.1f s)", rep.errors[0], rep.errors[1],
               rep.errors[2], seconds_since(t0)));
    const double el = seconds_since(t0);
    c.require(el < 900.0, fmt("runtime %.1f s", el));
    return c;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int a = 1; a < argc; ++a) {
        if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc)
            only = std::atoi(argv[++a]);
        else if (std::strcmp(argv[a], "--list") == 0) {
            std::printf("criteria 1..11\n");
            return 0;
        }
    }
    using Fn = Criterion (*)();
    const Fn fns[] = {criterion1, criterion2, criterion3, criterion4,
                      criterion5, criterion6, criterion7, criterion8,
                      criterion9, criterion10, criterion11};
    int failures = 0;
    for (int k = 0; k < 11; ++k) {
        if (only != 0 && only != k + 1) continue;
        Criterion c = fns[k]();
        std::printf("criterion %2d: %s - %s%s%s\n", c.id, c.pass ? "PASS" : "FAIL",
                    c.label.c_str(), c.detail.empty() ? "" : " | ", c.detail.c_str());
        std::fflush(stdout);
        if (!c.pass) ++failures;
    }
    return failures;
}
