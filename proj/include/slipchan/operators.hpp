#pragma once

/// @file operators.hpp
/// @brief Discrete spatial operators: the variational viscous operator
/// (assembled from the same deformation stencils as norms.hpp, so that
/// <A u, u> equals the dissipation quadrature exactly), the skew-symmetric
/// convection operator, and packed DOF-vector plumbing for the implicit
/// solves.

#include <cmath>
#include <span>
#include <vector>

#include "slipchan/constitutive.hpp"
#include "slipchan/fields.hpp"
#include "slipchan/grid.hpp"
#include "slipchan/linalg.hpp"
#include "slipchan/norms.hpp"

namespace slipchan {

/// Flat layout of the (u, v, g) unknowns in one vector. Constrained slots are
/// present and kept at zero.
struct DofLayout {
    const Grid* grid = nullptr;
    std::size_t ou = 0, ov = 0, og = 0, n = 0;

    explicit DofLayout(const Grid& g_) : grid(&g_) {
        ou = 0;
        ov = g_.usize();
        og = ov + g_.vsize();
        n = og + g_.gsize();
    }

    void pack(const FlowState& s, Vec& x) const {
        x.resize(n);
        std::copy(s.u.begin(), s.u.end(), x.begin() + ou);
        std::copy(s.v.begin(), s.v.end(), x.begin() + ov);
        std::copy(s.g.begin(), s.g.end(), x.begin() + og);
    }
    void unpack(const Vec& x, FlowState& s) const {
        std::copy(x.begin() + ou, x.begin() + ov, s.u.begin());
        std::copy(x.begin() + ov, x.begin() + og, s.v.begin());
        std::copy(x.begin() + og, x.end(), s.g.begin());
    }

    std::span<const double> u(const Vec& x) const { return {x.data() + ou, ov - ou}; }
    std::span<const double> v(const Vec& x) const { return {x.data() + ov, og - ov}; }
    std::span<const double> g(const Vec& x) const { return {x.data() + og, n - og}; }
    std::span<double> u(Vec& x) const { return {x.data() + ou, ov - ou}; }
    std::span<double> v(Vec& x) const { return {x.data() + ov, og - ov}; }
    std::span<double> g(Vec& x) const { return {x.data() + og, n - og}; }

    /// Zero the constrained slots (end u/g columns, wall v rows).
    void enforce(Vec& x) const {
        const Grid& gr = *grid;
        if (!gr.periodic()) {
            for (int j = 0; j < gr.ny; ++j) {
                x[ou + gr.uidx(0, j)] = 0.0;
                x[ou + gr.uidx(gr.nx, j)] = 0.0;
            }
            x[og + 0] = 0.0;
            x[og + gr.nx] = 0.0;
        }
        for (int i = 0; i < gr.nx; ++i) {
            x[ov + gr.vidx(i, 0)] = 0.0;
            x[ov + gr.vidx(i, gr.ny)] = 0.0;
        }
    }

    /// H mass diagonal (trapezoid weights; beta on the boundary block).
    Vec mass(double beta) const {
        const Grid& gr = *grid;
        Vec m(n, 0.0);
        const double vol = gr.dx * gr.dy;
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.ucols(); ++i)
                if (gr.u_free(i, j)) m[ou + gr.uidx(i, j)] = quad::u_col_weight(gr, i) * vol;
        for (int j = 0; j <= gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i)
                if (gr.v_free(i, j)) m[ov + gr.vidx(i, j)] = vol;
        for (int i = 0; i < gr.ucols(); ++i)
            if (gr.g_free(i)) m[og + i] = beta * quad::u_col_weight(gr, i) * gr.dx;
        return m;
    }
};

// ---------------------------------------------------------------------------
// Viscous operator
// ---------------------------------------------------------------------------

/// Weighted-residual viscous operator built from per-quadrature-point
/// coefficients: cells carry coef * (Dxx Wxx + Dyy Wyy), corners carry
/// coef * 2 Dxy Wxy, the wall carries slip_coef * g. For linear laws the
/// coefficient is the constant 2 nu and the operator is the stiffness of
/// 2 nu (Du, Dw) + 2 nu alpha (g, g_w); for shear-dependent laws the
/// coefficients are evaluated from a given state (lagged Picard within the
/// implicit solve, exact within residual/dissipation evaluations).
class ViscousOperator {
public:
    ViscousOperator(const Grid& grid, StressLaw stress, SlipLaw slip, double alpha)
        : grid_(grid), layout_(grid), stress_(stress), slip_(slip), alpha_(alpha) {
        cell_coef_.assign(grid.psize(), 0.0);
        corner_coef_.assign(corner_count(), 0.0);
        slip_coef_.assign(grid.gsize(), 0.0);
        set_coefficients_linear();
    }

    const DofLayout& layout() const { return layout_; }
    double alpha() const { return alpha_; }
    const StressLaw& stress() const { return stress_; }
    const SlipLaw& slip() const { return slip_; }

    /// Constant coefficients: exact for linear laws, and the zero-shear limit
    /// otherwise (used only as an initial guess before set_lagged).
    void set_coefficients_linear() {
        const double cs = stress_.coefficient(0.0);
        for (auto& c : cell_coef_) c = cs;
        for (auto& c : corner_coef_) c = cs;
        for (auto& c : slip_coef_) c = 0.0;
        const Grid& gr = grid_;
        for (int i = 0; i < gr.ucols(); ++i)
            slip_coef_[i] = alpha_ * slip_.deriv1(0.0);
    }

    /// Freeze coefficients at the deformation of `x` (packed DOF vector).
    /// For the stress this is nu(|D|^2) per quadrature point; for the slip
    /// rows it is alpha * s1'(g) (the Newton Jacobian of the wall term).
    void set_lagged(const Vec& x) {
        const Grid& gr = grid_;
        auto u = layout_.u(x);
        auto v = layout_.v(x);
        auto g = layout_.g(x);
        if (stress_.is_linear()) {
            const double cs = stress_.coefficient(0.0);
            for (auto& c : cell_coef_) c = cs;
            for (auto& c : corner_coef_) c = cs;
        } else {
            compute_shear_coefs(u, v, g, cell_coef_, corner_coef_);
        }
        for (int i = 0; i < gr.ucols(); ++i)
            slip_coef_[i] = alpha_ * slip_.deriv1(g[i]);
    }

    /// y += (stiffness with current coefficients) * x
    void apply(const Vec& x, Vec& y) const {
        apply_kernel(x, y, cell_coef_, corner_coef_, nullptr);
    }

    /// Exact weighted viscous+slip residual: y = R(x) with
    /// <R(x), w> = sum S(D x):D w + alpha * sum s1(g) g_w.
    void residual(const Vec& x, Vec& y) const {
        std::vector<double> cc(cell_coef_.size()), kc(corner_coef_.size());
        auto u = layout_.u(x);
        auto v = layout_.v(x);
        auto g = layout_.g(x);
        if (stress_.is_linear()) {
            const double cs = stress_.coefficient(0.0);
            for (auto& c : cc) c = cs;
            for (auto& c : kc) c = cs;
        } else {
            compute_shear_coefs(u, v, g, cc, kc);
        }
        std::fill(y.begin(), y.end(), 0.0);
        apply_kernel(x, y, cc, kc, &slip_exact_tag_);
    }

    /// Dissipation quadrature: sum S(Du):Du + alpha sum s(u).u; equals
    /// <residual(x), x> by construction.
    double dissipation(const Vec& x) const {
        Vec y(layout_.n, 0.0);
        residual(x, y);
        return dot(y, x);
    }

    /// Jacobi diagonal of the current-coefficient stiffness.
    Vec diagonal() const {
        const Grid& gr = grid_;
        Vec d(layout_.n, 0.0);
        const double vol = gr.dx * gr.dy;
        const double idx2 = 1.0 / (gr.dx * gr.dx), idy2 = 1.0 / (gr.dy * gr.dy);
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i) {
                const double c = cell_coef_[gr.pidx(i, j)] * vol;
                const int ie = gr.periodic() ? gr.wu(i + 1) : i + 1;
                d[layout_.ou + gr.uidx(i, j)] += c * idx2;
                d[layout_.ou + gr.uidx(ie, j)] += c * idx2;
                d[layout_.ov + gr.vidx(i, j)] += c * idy2;
                d[layout_.ov + gr.vidx(i, j + 1)] += c * idy2;
            }
        for (int j = 0; j <= gr.ny; ++j)
            for (int i = 0; i < quad::corner_cols(gr); ++i) {
                const double c = 2.0 * corner_coef_[cidx(i, j)] * gr.corner_weight(i, j) * vol;
                // du/dy participants
                if (j == 0) {
                    d[layout_.ou + gr.uidx(i, 0)] += c * idy2;
                    d[layout_.og + i] += c * idy2;
                } else if (j == gr.ny) {
                    d[layout_.ou + gr.uidx(i, gr.ny - 1)] += c * idy2;
                } else {
                    d[layout_.ou + gr.uidx(i, j)] += c * 0.25 * idy2;
                    d[layout_.ou + gr.uidx(i, j - 1)] += c * 0.25 * idy2;
                }
                // dv/dx participants
                if (!gr.periodic() && i == 0) {
                    d[layout_.ov + gr.vidx(0, j)] += c * idx2;
                } else if (!gr.periodic() && i == gr.nx) {
                    d[layout_.ov + gr.vidx(gr.nx - 1, j)] += c * idx2;
                } else {
                    d[layout_.ov + gr.vidx(gr.wv(i), j)] += c * 0.25 * idx2;
                    d[layout_.ov + gr.vidx(gr.wv(i - 1), j)] += c * 0.25 * idx2;
                }
            }
        for (int i = 0; i < gr.ucols(); ++i)
            d[layout_.og + i] += slip_coef_[i] * quad::u_col_weight(gr, i) * gr.dx;
        // mask constrained slots
        Vec mask(layout_.n, 1.0);
        layout_.enforce(mask);
        for (std::size_t k = 0; k < d.size(); ++k)
            if (mask[k] == 0.0) d[k] = 0.0;
        return d;
    }

private:
    std::size_t corner_count() const {
        return static_cast<std::size_t>(quad::corner_cols(grid_)) * (grid_.ny + 1);
    }
    std::size_t cidx(int i, int j) const {
        return static_cast<std::size_t>(j) * quad::corner_cols(grid_) + i;
    }

    /// |D|^2 needs all three entries at one point; cross terms are averaged
    /// from the neighboring quadrature points.
    void compute_shear_coefs(std::span<const double> u, std::span<const double> v,
                             std::span<const double> g, std::vector<double>& cc,
                             std::vector<double>& kc) const {
        const Grid& gr = grid_;
        std::vector<double> dxy2(corner_count());
        std::vector<double> diag2(gr.psize());
        for (int j = 0; j <= gr.ny; ++j)
            for (int i = 0; i < quad::corner_cols(gr); ++i) {
                const double a = quad::corner_dyu(gr, u, g, i, j);
                const double b = quad::corner_dxv(gr, v, i, j);
                const double dxy = 0.5 * (a + b);
                dxy2[cidx(i, j)] = 2.0 * dxy * dxy;
            }
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i) {
                const double dxx = quad::cell_dxx(gr, u, i, j);
                const double dyy = quad::cell_dyy(gr, v, i, j);
                diag2[gr.pidx(i, j)] = dxx * dxx + dyy * dyy;
            }
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i) {
                const int ie = gr.periodic() ? gr.wu(i + 1) : i + 1;
                const double cross = 0.25 * (dxy2[cidx(i, j)] + dxy2[cidx(ie, j)] +
                                             dxy2[cidx(i, j + 1)] + dxy2[cidx(ie, j + 1)]);
                cc[gr.pidx(i, j)] = stress_.coefficient(diag2[gr.pidx(i, j)] + cross);
            }
        for (int j = 0; j <= gr.ny; ++j)
            for (int i = 0; i < quad::corner_cols(gr); ++i) {
                double s = 0.0;
                int cnt = 0;
                for (int dj = -1; dj <= 0; ++dj)
                    for (int di = -1; di <= 0; ++di) {
                        const int pj = j + dj;
                        int pi = i + di;
                        if (pj < 0 || pj >= gr.ny) continue;
                        if (gr.periodic()) pi = gr.wv(pi);
                        else if (pi < 0 || pi >= gr.nx) continue;
                        s += diag2[gr.pidx(pi, pj)];
                        ++cnt;
                    }
                const double z = dxy2[cidx(i, j)] + (cnt ? s / cnt : 0.0);
                kc[cidx(i, j)] = stress_.coefficient(z);
            }
    }

    /// Shared symmetric kernel. If `exact_slip` is non-null the wall rows use
    /// alpha * s1(g) (nonlinear residual); otherwise slip_coef_ * g.
    void apply_kernel(const Vec& x, Vec& y, const std::vector<double>& cc,
                      const std::vector<double>& kc, const int* exact_slip) const {
        const Grid& gr = grid_;
        auto xu = layout_.u(x);
        auto xv = layout_.v(x);
        auto xg = layout_.g(x);
        const double vol = gr.dx * gr.dy;
        for (int j = 0; j < gr.ny; ++j)
            for (int i = 0; i < gr.nx; ++i) {
                const double c = cc[gr.pidx(i, j)] * vol;
                const int ie = gr.periodic() ? gr.wu(i + 1) : i + 1;
                const double dxx = quad::cell_dxx(gr, xu, i, j);
                const double dyy = quad::cell_dyy(gr, xv, i, j);
                const double tx = c * dxx / gr.dx;
                y[layout_.ou + gr.uidx(ie, j)] += tx;
                y[layout_.ou + gr.uidx(i, j)] -= tx;
                const double ty = c * dyy / gr.dy;
                y[layout_.ov + gr.vidx(i, j + 1)] += ty;
                y[layout_.ov + gr.vidx(i, j)] -= ty;
            }
        for (int j = 0; j <= gr.ny; ++j)
            for (int i = 0; i < quad::corner_cols(gr); ++i) {
                const double a = quad::corner_dyu(gr, xu, xg, i, j);
                const double b = quad::corner_dxv(gr, xv, i, j);
                const double dxy = 0.5 * (a + b);
                const double t = 2.0 * kc[cidx(i, j)] * dxy * gr.corner_weight(i, j) * vol;
                if (j == 0) {
                    y[layout_.ou + gr.uidx(i, 0)] += t / gr.dy;
                    y[layout_.og + i] -= t / gr.dy;
                } else if (j == gr.ny) {
                    y[layout_.ou + gr.uidx(i, gr.ny - 1)] -= t / gr.dy;
                } else {
                    y[layout_.ou + gr.uidx(i, j)] += 0.5 * t / gr.dy;
                    y[layout_.ou + gr.uidx(i, j - 1)] -= 0.5 * t / gr.dy;
                }
                if (!gr.periodic() && i == 0) {
                    y[layout_.ov + gr.vidx(0, j)] += t / gr.dx;
                } else if (!gr.periodic() && i == gr.nx) {
                    y[layout_.ov + gr.vidx(gr.nx - 1, j)] -= t / gr.dx;
                } else {
                    y[layout_.ov + gr.vidx(gr.wv(i), j)] += 0.5 * t / gr.dx;
                    y[layout_.ov + gr.vidx(gr.wv(i - 1), j)] -= 0.5 * t / gr.dx;
                }
            }
        for (int i = 0; i < gr.ucols(); ++i) {
            const double w = quad::u_col_weight(gr, i) * gr.dx;
            if (exact_slip)
                y[layout_.og + i] += alpha_ * slip_.eval1(xg[i]) * w;
            else
                y[layout_.og + i] += slip_coef_[i] * xg[i] * w;
        }
        layout_.enforce(y);
    }

    const Grid& grid_;
    DofLayout layout_;
    StressLaw stress_;
    SlipLaw slip_;
    double alpha_;
    std::vector<double> cell_coef_, corner_coef_, slip_coef_;
    static constexpr int slip_exact_tag_ = 1;
};

// ---------------------------------------------------------------------------
// Convection
// ---------------------------------------------------------------------------

enum class ConvectionScheme { skew_symmetric, divergence_form, off };

/// Pointwise convective acceleration N(a) w on velocity faces. In the
/// skew-symmetric form the centered flux divergence is corrected by half the
/// advecting field's local divergence, which makes <N(a) w, w> vanish exactly
/// for any a and w (summed with the face volume weights).
inline void convection(const Grid& grid, ConvectionScheme scheme,
                       const FlowState& a, const FlowState& w, Vec& out_u,
                       Vec& out_v) {
    out_u.assign(grid.usize(), 0.0);
    out_v.assign(grid.vsize(), 0.0);
    if (scheme == ConvectionScheme::off) return;
    const bool skew = scheme == ConvectionScheme::skew_symmetric;
    const double vol = grid.dx * grid.dy;

    auto au = [&](int i, int j) { return a.u[grid.uidx(grid.wu(i), j)]; };
    auto av = [&](int i, int j) { return a.v[grid.vidx(grid.wv(i), j)]; };
    auto wu_at = [&](int i, int j) -> double {
        if (j < 0 || j >= grid.ny) return 0.0; // flux through the wall is zero
        return w.u[grid.uidx(grid.wu(i), j)];
    };
    auto wv_at = [&](int i, int j) -> double {
        if (!grid.periodic() && (i < 0 || i >= grid.nx)) return 0.0;
        return w.v[grid.vidx(grid.wv(i), j)];
    };

    // u-momentum cells
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.ucols(); ++i) {
            if (!grid.u_free(i, j)) continue;
            const double qe = 0.5 * (au(i, j) + au(i + 1, j)) * grid.dy;
            const double qw = 0.5 * (au(i - 1, j) + au(i, j)) * grid.dy;
            const double qn = 0.5 * (av(i - 1, j + 1) + av(i, j + 1)) * grid.dx;
            const double qs = 0.5 * (av(i - 1, j) + av(i, j)) * grid.dx;
            const double we = 0.5 * (wu_at(i, j) + wu_at(i + 1, j));
            const double ww = 0.5 * (wu_at(i - 1, j) + wu_at(i, j));
            const double wn = 0.5 * (wu_at(i, j) + wu_at(i, j + 1));
            const double ws = 0.5 * (wu_at(i, j - 1) + wu_at(i, j));
            double r = (qe * we - qw * ww + qn * wn - qs * ws) / vol;
            if (skew) r -= 0.5 * wu_at(i, j) * (qe - qw + qn - qs) / vol;
            out_u[grid.uidx(i, j)] = r;
        }

    // v-momentum cells
    for (int j = 1; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double qe = 0.5 * (au(i + 1, j - 1) + au(i + 1, j)) * grid.dy;
            const double qw = 0.5 * (au(i, j - 1) + au(i, j)) * grid.dy;
            const double qn = 0.5 * (av(i, j) + av(i, j + 1)) * grid.dx;
            const double qs = 0.5 * (av(i, j - 1) + av(i, j)) * grid.dx;
            const double we = 0.5 * (wv_at(i, j) + wv_at(i + 1, j));
            const double ww = 0.5 * (wv_at(i - 1, j) + wv_at(i, j));
            const double wn = 0.5 * (wv_at(i, j) + wv_at(i, j + 1));
            const double ws = 0.5 * (wv_at(i, j - 1) + wv_at(i, j));
            double r = (qe * we - qw * ww + qn * wn - qs * ws) / vol;
            if (skew) r -= 0.5 * wv_at(i, j) * (qe - qw + qn - qs) / vol;
            out_v[grid.vidx(i, j)] = r;
        }
}

} // namespace slipchan
