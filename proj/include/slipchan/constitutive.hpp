#pragma once

/// @file constitutive.hpp
/// @brief Stress law S(D) and boundary slip law s(u), with validators for
/// the structural coercivity/growth conditions.
///
/// Shipped forms:
///   stress : linear S(D) = 2 nu D, or shear-dependent S(D) = nu(|D|^2) D
///            with nu(z) = nu_a + nu_b / (1 + z)
///   slip   : linear s(u) = 2 nu u, or nonlinear s(u) = p u + q u / (1 + |u|^2)
///
/// For the rational families the sharp structural constants are
///   c1 = c3 = nu_a - nu_b/8 (resp. p - q/8), attained along u at |u|^2 = 3,
///   c2 = nu_a + nu_b (resp. p + q), attained at 0.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slipchan/rng.hpp"

namespace slipchan {

/// Symmetric 2x2 matrix; |D|^2 = xx^2 + 2 xy^2 + yy^2.
struct Sym2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;

    double norm_sq() const { return xx * xx + 2.0 * xy * xy + yy * yy; }
    double norm() const { return std::sqrt(norm_sq()); }
    double contract(const Sym2& o) const {
        return xx * o.xx + 2.0 * xy * o.xy + yy * o.yy;
    }
    Sym2 operator-(const Sym2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
    Sym2 operator+(const Sym2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
    Sym2 scaled(double c) const { return {c * xx, c * xy, c * yy}; }
};

struct Vec2 {
    double x = 0.0, y = 0.0;
    double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm_sq()); }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 scaled(double c) const { return {c * x, c * y}; }
};

struct StressLaw {
    enum class Kind { linear, shear_dependent };
    Kind kind = Kind::linear;
    double nu = 1.0;               ///< linear kind: S = 2 nu D
    double nu_a = 1.0, nu_b = 0.0; ///< shear kind: nu(z) = nu_a + nu_b/(1+z)
    double c1 = 2.0, c2 = 2.0, c3 = 2.0;

    static StressLaw linear(double nu) {
        StressLaw s;
        s.kind = Kind::linear;
        s.nu = nu;
        s.c1 = s.c2 = s.c3 = 2.0 * nu;
        return s;
    }
    static StressLaw shear_dependent(double nu_a, double nu_b) {
        if (!(nu_a > nu_b / 8.0) || nu_b < 0.0)
            throw std::invalid_argument("shear_dependent: need nu_a > nu_b/8 >= 0");
        StressLaw s;
        s.kind = Kind::shear_dependent;
        s.nu_a = nu_a;
        s.nu_b = nu_b;
        s.c1 = s.c3 = nu_a - nu_b / 8.0;
        s.c2 = nu_a + nu_b;
        return s;
    }

    bool is_linear() const { return kind == Kind::linear; }

    /// Effective 2 nu(|D|^2); S(D) = coefficient(|D|^2)/2 * 2D... i.e.
    /// S(D) = coefficient(z) * D with z = |D|^2.
    double coefficient(double z) const {
        if (kind == Kind::linear) return 2.0 * nu;
        return nu_a + nu_b / (1.0 + z);
    }

    Sym2 eval(const Sym2& d) const { return d.scaled(coefficient(d.norm_sq())); }
};

struct SlipLaw {
    enum class Kind { linear, nonlinear };
    Kind kind = Kind::linear;
    double nu = 1.0;           ///< linear kind: s = 2 nu u
    double p = 2.0, q = 0.0;   ///< nonlinear kind: s(u) = p u + q u/(1+|u|^2)
    double c1 = 2.0, c2 = 2.0, c3 = 2.0;

    static SlipLaw linear(double nu) {
        SlipLaw s;
        s.kind = Kind::linear;
        s.nu = nu;
        s.c1 = s.c2 = s.c3 = 2.0 * nu;
        return s;
    }
    static SlipLaw nonlinear(double p, double q) {
        if (!(p > q / 8.0) || q < 0.0)
            throw std::invalid_argument("nonlinear slip: need p > q/8 >= 0");
        SlipLaw s;
        s.kind = Kind::nonlinear;
        s.p = p;
        s.q = q;
        s.c1 = s.c3 = p - q / 8.0;
        s.c2 = p + q;
        return s;
    }

    bool is_linear() const { return kind == Kind::linear; }

    double coefficient(double z) const {
        if (kind == Kind::linear) return 2.0 * nu;
        return p + q / (1.0 + z);
    }

    Vec2 eval(const Vec2& u) const { return u.scaled(coefficient(u.norm_sq())); }

    /// Scalar slice used by the wall rows: s1(g) for the trace (g, 0).
    double eval1(double g) const { return g * coefficient(g * g); }

    /// d s1 / d g, used by the Newton update of the boundary rows.
    double deriv1(double g) const {
        if (kind == Kind::linear) return 2.0 * nu;
        const double z = g * g;
        const double d = 1.0 + z;
        return p + q * (1.0 - z) / (d * d);
    }
};

// ---------------------------------------------------------------------------
// Structural-condition validation by randomized sampling
// ---------------------------------------------------------------------------

struct ConditionReport {
    double min_coercivity_ratio = 0.0; ///< inf (S(D)-S(E)):(D-E)/|D-E|^2
    double max_growth_ratio = 0.0;     ///< sup |S(D)|/|D|
    double min_deriv_ratio = 0.0;      ///< inf of the FD directional ratio
    bool coercivity_ok = false;
    bool growth_ok = false;
    bool deriv_ok = false;
    bool pass = false;
};

namespace detail {

inline Sym2 random_sym2(Rng& rng, double mag) {
    double a = rng.normal(), b = rng.normal(), c = rng.normal();
    Sym2 d{a, b, c};
    const double n = d.norm();
    if (n == 0.0) return {mag, 0.0, 0.0};
    return d.scaled(mag / n);
}

inline Vec2 random_vec2(Rng& rng, double mag) {
    const double th = rng.uniform(0.0, 6.283185307179586);
    return {mag * std::cos(th), mag * std::sin(th)};
}

inline ConditionReport finish(ConditionReport r, double c1, double c2, double c3) {
    const double tol = 1e-6;
    r.coercivity_ok = r.min_coercivity_ratio >= c1 * (1.0 - tol) - 1e-12;
    r.growth_ok = r.max_growth_ratio <= c2 * (1.0 + tol) + 1e-12;
    r.deriv_ok = r.min_deriv_ratio >= c3 * (1.0 - tol) - 1e-9;
    r.pass = r.coercivity_ok && r.growth_ok && r.deriv_ok;
    return r;
}

} // namespace detail

/// Sample the three structural conditions of a stress law; magnitudes
/// log-uniform in [1e-2, 1e2]. Failures are flags, not exceptions.
inline ConditionReport validate_conditions(const StressLaw& law, int sample_count,
                                           std::uint64_t seed) {
    if (sample_count < 1)
        throw std::invalid_argument("validate_conditions: sample_count >= 1");
    Rng rng(seed);
    ConditionReport r;
    r.min_coercivity_ratio = 1e300;
    r.min_deriv_ratio = 1e300;
    for (int k = 0; k < sample_count; ++k) {
        const Sym2 d = detail::random_sym2(rng, rng.log_uniform(-2.0, 2.0));
        const Sym2 e = detail::random_sym2(rng, rng.log_uniform(-2.0, 2.0));
        const Sym2 de = d - e;
        const double n2 = de.norm_sq();
        if (n2 > 1e-24) {
            const double mono = (law.eval(d) - law.eval(e)).contract(de) / n2;
            r.min_coercivity_ratio = std::min(r.min_coercivity_ratio, mono);
        }
        r.max_growth_ratio = std::max(r.max_growth_ratio, law.eval(d).norm() / d.norm());
        // central finite difference of the directional derivative
        const Sym2 dir = detail::random_sym2(rng, 1.0);
        const double t = 1e-5 * std::max(1.0, d.norm());
        const Sym2 sp = law.eval(d + dir.scaled(t));
        const Sym2 sm = law.eval(d - dir.scaled(t));
        const double dd = (sp - sm).contract(dir) / (2.0 * t * dir.norm_sq());
        r.min_deriv_ratio = std::min(r.min_deriv_ratio, dd);
    }
    return detail::finish(r, law.c1, law.c2, law.c3);
}

inline ConditionReport validate_conditions(const SlipLaw& law, int sample_count,
                                           std::uint64_t seed) {
    if (sample_count < 1)
        throw std::invalid_argument("validate_conditions: sample_count >= 1");
    Rng rng(seed);
    ConditionReport r;
    r.min_coercivity_ratio = 1e300;
    r.min_deriv_ratio = 1e300;
    for (int k = 0; k < sample_count; ++k) {
        const Vec2 u = detail::random_vec2(rng, rng.log_uniform(-2.0, 2.0));
        const Vec2 v = detail::random_vec2(rng, rng.log_uniform(-2.0, 2.0));
        const Vec2 uv = u - v;
        const double n2 = uv.norm_sq();
        if (n2 > 1e-24) {
            const double mono = (law.eval(u) - law.eval(v)).dot(uv) / n2;
            r.min_coercivity_ratio = std::min(r.min_coercivity_ratio, mono);
        }
        r.max_growth_ratio = std::max(r.max_growth_ratio, law.eval(u).norm() / u.norm());
        const Vec2 dir = detail::random_vec2(rng, 1.0);
        const double t = 1e-5 * std::max(1.0, u.norm());
        const Vec2 sp = law.eval(u + dir.scaled(t));
        const Vec2 sm = law.eval(u - dir.scaled(t));
        const double dd = (sp - sm).dot(dir) / (2.0 * t);
        r.min_deriv_ratio = std::min(r.min_deriv_ratio, dd);
    }
    return detail::finish(r, law.c1, law.c2, law.c3);
}

} // namespace slipchan
