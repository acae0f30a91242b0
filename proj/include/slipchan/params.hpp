#pragma once

/// @file params.hpp
/// @brief Physical parameters and the nondimensionalization map.
///
/// All solver and verification code works in nondimensional variables
/// (channel width 1, unit viscosity). The scaling map below is the single
/// source of truth for moving between physical and scaled quantities:
///
///   alpha* = alpha * L,   beta* = beta / L,   T* = nu T / L^2,
///   f* = (L^3/nu^2) f,    h* = (L^3/nu^2) h,
///   ||(f*,h*)||_H^2 = (L^4/nu^4) ||(f,h)||_{H_L}^2 .

#include <stdexcept>
#include <string>

namespace slipchan {

struct PhysicalParams {
    double alpha = 1.0; ///< boundary slip coefficient (> 0)
    double beta = 1.0;  ///< boundary inertia coefficient (> 0)
    double nu = 1.0;    ///< kinematic viscosity (> 0)
    double L = 1.0;     ///< channel width (> 0)
    double T = 1.0;     ///< final time (> 0)

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string("PhysicalParams: ") +
                                            name + " must be positive");
        };
        positive(alpha, "alpha");
        positive(beta, "beta");
        positive(nu, "nu");
        positive(L, "L");
        positive(T, "T");
    }
};

/// Result of nondimensionalizing a PhysicalParams set. The scaled system has
/// nu = 1, L = 1; `forcing_scale` multiplies physical (f, h) samples taken at
/// physical coordinates (L x*, L y*) to produce the scaled forcing.
struct ScaledParams {
    PhysicalParams scaled;  ///< alpha*, beta*, nu = 1, L = 1, T*
    double forcing_scale;   ///< L^3 / nu^2
    double velocity_scale;  ///< a = nu / L   (u = a u*)
    double time_scale;      ///< tau = L^2 / nu  (t = tau t*)
    double hnorm_sq_scale;  ///< L^4 / nu^4  (scaled H-norm^2 per physical)
};

inline ScaledParams nondimensionalize(const PhysicalParams& p) {
    p.validate();
    ScaledParams s;
    s.scaled.alpha = p.alpha * p.L;
    s.scaled.beta = p.beta / p.L;
    s.scaled.nu = 1.0;
    s.scaled.L = 1.0;
    s.scaled.T = p.nu * p.T / (p.L * p.L);
    s.forcing_scale = p.L * p.L * p.L / (p.nu * p.nu);
    s.velocity_scale = p.nu / p.L;
    s.time_scale = p.L * p.L / p.nu;
    s.hnorm_sq_scale = s.forcing_scale * s.forcing_scale / (p.L * p.L);
    return s;
}

/// Inverse of nondimensionalize: recover physical parameters from the scaled
/// ones, given the physical nu and L that produced them.
inline PhysicalParams redimensionalize(const PhysicalParams& scaled, double nu,
                                       double L) {
    PhysicalParams p;
    p.alpha = scaled.alpha / L;
    p.beta = scaled.beta * L;
    p.nu = nu;
    p.L = L;
    p.T = scaled.T * L * L / nu;
    p.validate();
    return p;
}

} // namespace slipchan
