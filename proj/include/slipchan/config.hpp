#pragma once

/// @file config.hpp
/// @brief Flat key = value run configuration. Keys use the physical symbol
/// names (alpha, beta, nu, L, kappa, ...) so the math-to-config map stays
/// one-to-one. '#' starts a comment; unknown keys are rejected.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "slipchan/constitutive.hpp"
#include "slipchan/fields.hpp"
#include "slipchan/grid.hpp"
#include "slipchan/params.hpp"
#include "slipchan/stepper.hpp"

namespace slipchan {

struct RunConfig {
    // physical parameters
    double alpha = 1.0, beta = 1.0, nu = 1.0, L = 1.0, T = 1.0;
    double kappa = 0.28867513459481288; // 1/(2 sqrt 3)
    // grid
    int n_trunc = 4, nx = 128, ny = 16;
    std::string x_mode = "dirichlet_ends";
    // stepping
    double dt = 5e-3, theta = 1.0, div_tol = 1e-8;
    std::string convection = "skew_symmetric";
    // laws
    std::string stress_law = "linear"; // linear | shear_dependent
    double stress_nu_a = 1.0, stress_nu_b = 1.0;
    std::string slip_law = "linear"; // linear | nonlinear
    double slip_p = 2.0, slip_q = 1.0;
    // forcing template
    std::string forcing = "gaussian_bump"; // zero|constant|gaussian_bump|boundary_bump
    double f_amp = 1.0, f_x0 = 0.0, f_sigma = 0.75;
    bool normalize_fh = true; ///< rescale so ||(f,h)||_H = f_amp
    // initial data
    std::string init = "zero"; // zero | stream_bump
    double init_amp = 1.0;
    // outputs
    std::string out_dir = ".";
    int cadence = 10;       ///< record every N steps
    int snapshot_every = 0; ///< 0 = only final
    std::uint64_t seed = 1;

    // verification-suite knobs
    int suite_samples = 200;
    bool force_constitutive_fail = false; ///< deliberately over-declare c1

    void apply(const std::string& key, const std::string& value);
    void validate() const;
};

inline void RunConfig::apply(const std::string& key, const std::string& value) {
    auto as_double = [&] { return std::stod(value); };
    auto as_int = [&] { return std::stoi(value); };
    auto as_bool = [&] {
        if (value == "true" || value == "1") return true;
        if (value == "false" || value == "0") return false;
        throw std::invalid_argument("config: bad boolean for " + key);
    };
    if (key == "alpha") alpha = as_double();
    else if (key == "beta") beta = as_double();
    else if (key == "nu") nu = as_double();
    else if (key == "L") L = as_double();
    else if (key == "T") T = as_double();
    else if (key == "kappa") kappa = as_double();
    else if (key == "n_trunc") n_trunc = as_int();
    else if (key == "nx") nx = as_int();
    else if (key == "ny") ny = as_int();
    else if (key == "x_mode") x_mode = value;
    else if (key == "dt") dt = as_double();
    else if (key == "theta") theta = as_double();
    else if (key == "div_tol") div_tol = as_double();
    else if (key == "convection") convection = value;
    else if (key == "stress_law") stress_law = value;
    else if (key == "stress_nu_a") stress_nu_a = as_double();
    else if (key == "stress_nu_b") stress_nu_b = as_double();
    else if (key == "slip_law") slip_law = value;
    else if (key == "slip_p") slip_p = as_double();
    else if (key == "slip_q") slip_q = as_double();
    else if (key == "forcing") forcing = value;
    else if (key == "f_amp") f_amp = as_double();
    else if (key == "f_x0") f_x0 = as_double();
    else if (key == "f_sigma") f_sigma = as_double();
    else if (key == "normalize_fh") normalize_fh = as_bool();
    else if (key == "init") init = value;
    else if (key == "init_amp") init_amp = as_double();
    else if (key == "out_dir") out_dir = value;
    else if (key == "cadence") cadence = as_int();
    else if (key == "snapshot_every") snapshot_every = as_int();
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "suite_samples") suite_samples = as_int();
    else if (key == "force_constitutive_fail") force_constitutive_fail = as_bool();
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline void RunConfig::validate() const {
    PhysicalParams p{alpha, beta, nu, L, T};
    p.validate();
    if (x_mode != "dirichlet_ends" && x_mode != "periodic")
        throw std::invalid_argument("config: x_mode must be dirichlet_ends or periodic");
    if (convection != "skew_symmetric" && convection != "divergence_form" &&
        convection != "off")
        throw std::invalid_argument("config: bad convection scheme");
    if (stress_law != "linear" && stress_law != "shear_dependent")
        throw std::invalid_argument("config: bad stress_law");
    if (slip_law != "linear" && slip_law != "nonlinear")
        throw std::invalid_argument("config: bad slip_law");
    if (forcing != "zero" && forcing != "constant" && forcing != "gaussian_bump" &&
        forcing != "boundary_bump")
        throw std::invalid_argument("config: bad forcing template");
    if (init != "zero" && init != "stream_bump")
        throw std::invalid_argument("config: bad init");
    if (cadence < 1) throw std::invalid_argument("config: cadence >= 1");
    if ((stress_law != "linear" || slip_law != "linear") && (nu != 1.0 || L != 1.0))
        throw std::invalid_argument(
            "config: nonlinear laws are specified in scaled units; set nu = L = 1");
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
            if (blank) continue;
            throw std::invalid_argument("config: malformed line " + std::to_string(lineno));
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            return s.substr(b, e - b + 1);
        };
        cfg.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Config -> concrete objects (in scaled variables)
// ---------------------------------------------------------------------------

struct ScaledSetup {
    Grid grid;
    double alpha = 1.0, beta = 1.0; ///< scaled alpha*, beta*
    double t_end = 1.0;             ///< scaled final time
    StressLaw stress;
    SlipLaw slip;
    SolverConfig solver;
    Forcing forcing;
    FlowState initial;
};

inline ConvectionScheme convection_from(const std::string& s) {
    if (s == "skew_symmetric") return ConvectionScheme::skew_symmetric;
    if (s == "divergence_form") return ConvectionScheme::divergence_form;
    return ConvectionScheme::off;
}

/// Build the scaled problem a config describes. Physical (nu, L) are folded
/// into alpha*, beta*, T* and the forcing scale for the linear laws; the
/// shipped nonlinear laws require nu = L = 1 (validated above), so the same
/// path covers them with an identity scaling.
inline ScaledSetup build_setup(const RunConfig& cfg) {
    cfg.validate();
    ScaledSetup s;
    const PhysicalParams phys{cfg.alpha, cfg.beta, cfg.nu, cfg.L, cfg.T};
    const ScaledParams sp = nondimensionalize(phys);
    s.alpha = sp.scaled.alpha;
    s.beta = sp.scaled.beta;
    s.t_end = sp.scaled.T;
    s.grid = build_grid(cfg.n_trunc, cfg.nx, cfg.ny,
                        cfg.x_mode == "periodic" ? XMode::periodic
                                                 : XMode::dirichlet_ends);
    s.stress = cfg.stress_law == "linear"
                   ? StressLaw::linear(1.0)
                   : StressLaw::shear_dependent(cfg.stress_nu_a, cfg.stress_nu_b);
    s.slip = cfg.slip_law == "linear" ? SlipLaw::linear(1.0)
                                      : SlipLaw::nonlinear(cfg.slip_p, cfg.slip_q);
    s.solver.dt = cfg.dt;
    s.solver.theta = cfg.theta;
    s.solver.div_tol = cfg.div_tol;
    s.solver.convection = convection_from(cfg.convection);

    ForcingKind kind = ForcingKind::zero;
    if (cfg.forcing == "constant") kind = ForcingKind::constant_x;
    else if (cfg.forcing == "gaussian_bump") kind = ForcingKind::gaussian_bump_x;
    else if (cfg.forcing == "boundary_bump") kind = ForcingKind::boundary_bump;
    s.forcing = make_template_forcing(s.grid, kind, cfg.f_amp * sp.forcing_scale,
                                      cfg.f_x0, cfg.f_sigma);
    if (cfg.normalize_fh && kind != ForcingKind::zero) {
        const double nrm = s.forcing.h_norm(s.grid, s.beta);
        if (nrm > 0.0) {
            const double target = cfg.f_amp;
            for (auto& w : s.forcing.fu) w *= target / nrm;
            for (auto& w : s.forcing.fv) w *= target / nrm;
            for (auto& w : s.forcing.hg) w *= target / nrm;
        }
    }

    if (cfg.init == "zero") {
        s.initial = make_state(s.grid);
    } else {
        Rng rng(cfg.seed);
        s.initial = random_stream_state(s.grid, rng);
        scale_state(s.initial, cfg.init_amp);
    }
    return s;
}

} // namespace slipchan
