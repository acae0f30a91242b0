/// @file test_core.cpp
/// @brief Grid construction, scaling map, quadrature norms, divergence.

#include "doctest.h"

#include <cmath>

#include "slipchan/fields.hpp"
#include "slipchan/grid.hpp"
#include "slipchan/norms.hpp"
#include "slipchan/params.hpp"
#include "slipchan/rng.hpp"

using namespace slipchan;

TEST_CASE("build_grid spacings and validation") {
    const Grid a = build_grid(1, 8, 4);
    CHECK(a.dx == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(a.dy == doctest::Approx(0.25).epsilon(1e-15));
    const Grid b = build_grid(4, 64, 16);
    CHECK(b.dx == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(b.dy == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK_THROWS_WITH_AS(build_grid(1, 2, 8), doctest::Contains("too coarse"),
                         std::invalid_argument);
    CHECK_THROWS_AS(build_grid(0, 8, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1, 8, -4), std::invalid_argument);
}

TEST_CASE("staggered index maps are consistent") {
    for (XMode mode : {XMode::dirichlet_ends, XMode::periodic}) {
        const Grid g = build_grid(2, 12, 6, mode);
        CHECK(g.usize() == static_cast<std::size_t>(g.ucols()) * g.ny);
        CHECK(g.vsize() == static_cast<std::size_t>(g.nx) * (g.ny + 1));
        // faces bracket the cell centers
        CHECK(g.xu(0) == doctest::Approx(-2.0));
        CHECK(g.xp(0) == doctest::Approx(-2.0 + 0.5 * g.dx));
        CHECK(g.yv(g.ny) == doctest::Approx(1.0));
        if (mode == XMode::periodic) {
            CHECK(g.wu(-1) == g.nx - 1);
            CHECK(g.wu(g.nx) == 0);
        }
    }
}

TEST_CASE("nondimensionalization map and round trip") {
    PhysicalParams p;
    p.alpha = 3.0;
    p.beta = 4.0;
    p.nu = 0.5;
    p.L = 2.0;
    p.T = 1.0;
    const ScaledParams s = nondimensionalize(p);
    CHECK(s.scaled.alpha == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(s.scaled.beta == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.forcing_scale == doctest::Approx(32.0).epsilon(1e-15));
    CHECK(s.scaled.T == doctest::Approx(0.5 * 1.0 / 4.0).epsilon(1e-15));

    // identity at unit parameters
    PhysicalParams unit;
    const ScaledParams su = nondimensionalize(unit);
    CHECK(su.scaled.alpha == doctest::Approx(1.0));
    CHECK(su.scaled.beta == doctest::Approx(1.0));
    CHECK(su.forcing_scale == doctest::Approx(1.0));

    // round trip
    const PhysicalParams back = redimensionalize(s.scaled, p.nu, p.L);
    CHECK(back.alpha == doctest::Approx(p.alpha).epsilon(1e-15));
    CHECK(back.beta == doctest::Approx(p.beta).epsilon(1e-15));
    CHECK(back.T == doctest::Approx(p.T).epsilon(1e-15));

    CHECK_THROWS_AS(nondimensionalize(PhysicalParams{-1.0, 1.0, 1.0, 1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("scaled forcing norm relation ||(f*,h*)||_H^2 = (L^4/nu^4)||(f,h)||_HL^2") {
    // Physical channel of width L sampled on the matching nondimensional grid;
    // the physical norm is computed here with explicit physical weights as an
    // independent check of the identity.
    PhysicalParams p;
    p.alpha = 1.0;
    p.beta = 0.7;
    p.nu = 0.5;
    p.L = 2.0;
    const ScaledParams s = nondimensionalize(p);
    const Grid g = build_grid(2, 24, 8, XMode::dirichlet_ends);
    Forcing f = sample_forcing(
        g, [](double x, double y) { return std::exp(-x * x) * (1.0 + y); },
        [](double x, double y) { return 0.3 * std::sin(x) * y; },
        [](double x) { return 0.5 * std::exp(-0.5 * x * x); });

    double phys = 0.0;
    {
        const double vol = (p.L * g.dx) * (p.L * g.dy);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.ucols(); ++i)
                if (g.u_free(i, j)) phys += f.fu[g.uidx(i, j)] * f.fu[g.uidx(i, j)] * vol;
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (g.v_free(i, j)) phys += f.fv[g.vidx(i, j)] * f.fv[g.vidx(i, j)] * vol;
        for (int i = 0; i < g.ucols(); ++i)
            if (g.g_free(i)) phys += p.beta * f.hg[i] * f.hg[i] * (p.L * g.dx);
    }

    Forcing fs = f;
    for (auto& w : fs.fu) w *= s.forcing_scale;
    for (auto& w : fs.fv) w *= s.forcing_scale;
    for (auto& w : fs.hg) w *= s.forcing_scale;
    const double scaled = fs.h_norm_sq(g, s.scaled.beta);
    CHECK(scaled == doctest::Approx(s.hnorm_sq_scale * phys).epsilon(1e-12));
}

TEST_CASE("norms: zero field, constant field, definitional identities") {
    const double alpha = 1.3, beta = 2.0;

    SUBCASE("zero field gives all zeros") {
        const Grid g = build_grid(2, 16, 8);
        const NormReport r = compute_norms(g, make_state(g), alpha, beta);
        CHECK(r.l2_omega == 0.0);
        CHECK(r.l2_gamma == 0.0);
        CHECK(r.grad_l2 == 0.0);
        CHECK(r.symgrad_l2 == 0.0);
        CHECK(r.v_norm == 0.0);
        CHECK(r.h_norm == 0.0);
        CHECK(r.l4_omega == 0.0);
    }

    SUBCASE("constant u=(c,0) with matching trace (periodic)") {
        const Grid g = build_grid(2, 16, 8, XMode::periodic);
        const double c = 0.75;
        FlowState s = make_state(g);
        for (auto& w : s.u) w = c;
        for (auto& w : s.g) w = c;
        const NormReport r = compute_norms(g, s, alpha, beta);
        const double area = 2.0 * g.n_trunc;      // |Omega| = 2n * 1
        const double gamma_len = 2.0 * g.n_trunc; // |Gamma|
        CHECK(r.h_norm * r.h_norm ==
              doctest::Approx(c * c * area + beta * c * c * gamma_len).epsilon(1e-14));
        // the interior gradient vanishes; the wall stencils see the top no-slip
        // jump, so only the cell (Dxx, Dyy) part is checked to be zero here
        CHECK(r.grad_l2 * r.grad_l2 >= r.symgrad_l2 * r.symgrad_l2);
    }

    SUBCASE("identities on random fields") {
        const Grid g = build_grid(1, 12, 8);
        Rng rng(42);
        for (int trial = 0; trial < 5; ++trial) {
            FlowState s = make_state(g);
            for (auto& w : s.u) w = rng.normal();
            for (auto& w : s.v) w = rng.normal();
            for (auto& w : s.g) w = rng.normal();
            enforce_constraints(g, s);
            const NormReport r = compute_norms(g, s, alpha, beta);
            const double v2 = r.v_norm * r.v_norm;
            const double h2 = r.h_norm * r.h_norm;
            CHECK(std::abs(v2 - (r.symgrad_l2 * r.symgrad_l2 + alpha * r.l2_gamma * r.l2_gamma)) <=
                  4e-15 * v2);
            CHECK(std::abs(h2 - (r.l2_omega * r.l2_omega + beta * r.l2_gamma * r.l2_gamma)) <=
                  4e-15 * h2);
        }
    }

    SUBCASE("dimension mismatch is rejected") {
        const Grid g = build_grid(1, 8, 4);
        FlowState s = make_state(g);
        s.u.pop_back();
        CHECK_THROWS_AS(compute_norms(g, s, alpha, beta), std::invalid_argument);
    }
}

TEST_CASE("discrete divergence of hand-built fields") {
    const Grid g = build_grid(2, 16, 8);

    SUBCASE("u = (y, 0) is divergence free") {
        FlowState s = make_state(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.ucols(); ++i)
                s.u[g.uidx(i, j)] = g.yu(j);
        CHECK(divergence_residual(g, s) == doctest::Approx(0.0).epsilon(1e-15));
    }

    SUBCASE("u = (x, 0) has divergence exactly 1") {
        FlowState s = make_state(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.ucols(); ++i)
                s.u[g.uidx(i, j)] = g.xu(i);
        CHECK(divergence_residual(g, s) == doctest::Approx(1.0).epsilon(1e-13));
    }

    SUBCASE("stream-function samples are discretely divergence free") {
        Rng rng(7);
        for (int trial = 0; trial < 8; ++trial) {
            const FlowState s = random_stream_state(g, rng);
            CHECK(divergence_residual(g, s) < 1e-12);
        }
        const Grid gp = build_grid(2, 16, 8, XMode::periodic);
        for (int trial = 0; trial < 4; ++trial) {
            const FlowState s = random_stream_state(gp, rng);
            CHECK(divergence_residual(gp, s) < 1e-12);
        }
    }
}

TEST_CASE("rng determinism") {
    Rng a(123), b(123);
    for (int k = 0; k < 100; ++k) CHECK(a.next_u64() == b.next_u64());
}
