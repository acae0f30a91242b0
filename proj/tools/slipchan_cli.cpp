/// @file slipchan_cli.cpp
/// @brief Command-line driver: simulate | constants | dimension | tangent |
/// exhaustion | verify. Each subcommand reads an optional config file plus
/// parameter overrides, writes its outputs, and prints a summary table.
/// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "slipchan/attractor.hpp"
#include "slipchan/config.hpp"
#include "slipchan/constants.hpp"
#include "slipchan/harness.hpp"
#include "slipchan/inequalities.hpp"
#include "slipchan/io.hpp"

using namespace slipchan;

namespace {

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "inf" || item == "Inf")
            out.push_back(std::numeric_limits<double>::infinity());
        else
            out.push_back(std::stod(item));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool has_seed = false;
};

RunConfig make_config(const CommonOpts& common,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig cfg = common.config_path.empty() ? RunConfig{} : load_config(common.config_path);
    for (const auto& [k, val] : overrides) cfg.apply(k, val);
    if (!common.out_dir.empty()) cfg.out_dir = common.out_dir;
    if (common.has_seed) cfg.seed = common.seed;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* sub, CommonOpts& common) {
    sub->add_option("--config", common.config_path, "config file (key = value lines)");
    sub->add_option("--out", common.out_dir, "output directory");
    sub->add_option("--seed", common.seed, "rng seed")->each([&common](const std::string&) {
        common.has_seed = true;
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"slipchan: 2D channel flow with a dynamic slip wall"};
    app.require_subcommand(1);

    // ---- simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "run one trajectory, write series + snapshot");
    CommonOpts sim_common;
    add_common(sim, sim_common);
    std::vector<std::pair<std::string, std::string>> sim_over;
    for (const char* key : {"alpha", "beta", "nu", "L", "T", "dt", "n_trunc", "nx", "ny",
                            "x_mode", "forcing", "f_amp", "f_sigma", "init", "cadence"}) {
        sim->add_option_function<std::string>(
            std::string("--") + key,
            [&sim_over, key](const std::string& v) { sim_over.emplace_back(key, v); });
    }

    // ---- constants ---------------------------------------------------------
    auto* con = app.add_subcommand("constants", "mu, lambda^2, Lambda tables and inequality reports");
    CommonOpts con_common;
    add_common(con, con_common);
    std::string con_alpha = "0,0.1,1,10,inf", con_beta = "1", con_L = "1";
    bool con_discrete = false, con_suite = false;
    std::string con_format = "csv";
    int con_ny = 64, con_ntrunc = 8, con_samples = 50;
    con->add_option("--alpha", con_alpha, "comma list (inf allowed)");
    con->add_option("--beta", con_beta, "comma list");
    con->add_option("--L", con_L, "comma list");
    con->add_flag("--discrete", con_discrete, "include the discrete eigenvalue");
    con->add_flag("--suite", con_suite, "include the inequality suite reports");
    con->add_option("--format", con_format, "csv | json");
    con->add_option("--ny", con_ny, "discrete eigensolve wall resolution");
    con->add_option("--n-trunc", con_ntrunc, "discrete eigensolve truncation");
    con->add_option("--samples", con_samples, "suite sample count");

    // ---- dimension ---------------------------------------------------------
    auto* dim = app.add_subcommand("dimension", "fractal-dimension bound tables");
    CommonOpts dim_common;
    add_common(dim, dim_common);
    std::string dim_alpha = "1", dim_beta = "1", dim_L = "1", dim_nu = "1";
    double dim_kappa = kKappaDirichlet, dim_fnorm = 1.0;
    dim->add_option("--alpha", dim_alpha, "comma list");
    dim->add_option("--beta", dim_beta, "comma list");
    dim->add_option("--L", dim_L, "comma list");
    dim->add_option("--nu", dim_nu, "comma list");
    dim->add_option("--kappa", dim_kappa, "Lieb-Thirring constant");
    dim->add_option("--fnorm", dim_fnorm, "||(f,h)||_{H_L}");

    // ---- tangent -----------------------------------------------------------
    auto* tan = app.add_subcommand("tangent", "quasidifferential ratios and N-trace estimates");
    CommonOpts tan_common;
    add_common(tan, tan_common);
    std::string tan_N = "4,8", tan_strategy = "both", tan_eps = "1e-1,1e-2,1e-3";
    double tan_window = 2.0, tan_T = 0.25;
    tan->add_option("--N", tan_N, "family sizes, comma list");
    tan->add_option("--strategy", tan_strategy, "random | stokes | both");
    tan->add_option("--eps", tan_eps, "quasidiff epsilons, decreasing");
    tan->add_option("--window", tan_window, "trace quadrature window (scaled time)");
    tan->add_option("--T", tan_T, "quasidiff horizon (scaled time)");
    std::vector<std::pair<std::string, std::string>> tan_over;
    for (const char* key : {"alpha", "beta", "dt", "n_trunc", "nx", "ny", "kappa",
                            "forcing", "f_amp", "f_sigma"}) {
        tan->add_option_function<std::string>(
            std::string("--") + key,
            [&tan_over, key](const std::string& v) { tan_over.emplace_back(key, v); });
    }

    // ---- exhaustion --------------------------------------------------------
    auto* exh = app.add_subcommand("exhaustion", "truncation study across expanding domains");
    CommonOpts exh_common;
    add_common(exh, exh_common);
    std::string exh_nlist = "4,8,16,32";
    exh->add_option("--n-list", exh_nlist, "truncation sizes; largest is the reference");
    std::vector<std::pair<std::string, std::string>> exh_over;
    for (const char* key : {"alpha", "beta", "T", "dt", "nx", "ny", "n_trunc",
                            "forcing", "f_amp", "f_sigma", "cadence"}) {
        exh->add_option_function<std::string>(
            std::string("--") + key,
            [&exh_over, key](const std::string& v) { exh_over.emplace_back(key, v); });
    }

    // ---- verify ------------------------------------------------------------
    auto* ver = app.add_subcommand("verify", "bundled verification suite, JSON verdict");
    CommonOpts ver_common;
    add_common(ver, ver_common);
    std::vector<std::pair<std::string, std::string>> ver_over;
    for (const char* key : {"alpha", "beta", "dt", "suite_samples",
                            "force_constitutive_fail"}) {
        ver->add_option_function<std::string>(
            std::string("--") + key,
            [&ver_over, key](const std::string& v) { ver_over.emplace_back(key, v); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            const RunConfig cfg = make_config(sim_common, sim_over);
            const SimulationSummary s = run_simulation(cfg);
            std::printf("t_final,h_norm,v_norm,max_div,max_energy_residual\n");
            std::printf("%.17g,%.17g,%.17g,%.3e,%.3e\n", s.t_final, s.h_norm_final,
                        s.v_norm_final, s.max_div_residual, s.max_energy_residual);
            std::printf("series: %s\nsnapshot: %s\n", s.series_path.c_str(),
                        s.snapshot_path.c_str());
            return 0;
        }

        if (con->parsed()) {
            const auto alphas = parse_list(con_alpha);
            const auto betas = parse_list(con_beta);
            const auto Ls = parse_list(con_L);
            nlohmann::json jtab = nlohmann::json::array();
            if (con_format == "csv") {
                std::printf("alpha,beta,L,mu,lambda_sq,Lambda%s\n",
                            con_discrete ? ",discrete_lambda_sq" : "");
            }
            for (double L : Ls)
                for (double b : betas)
                    for (double a : alphas) {
                        const EigenResult er = boundary_eigenvalue_mu(a);
                        const double lam = capital_lambda(a == 0.0 ? 1e-300 : a, b, L);
                        double dls = std::numeric_limits<double>::quiet_NaN();
                        if (con_discrete) {
                            const Grid g = build_grid(con_ntrunc, 4 * con_ntrunc * con_ny / 16, con_ny);
                            dls = discrete_lambda_sq(a, g).lambda_sq;
                        }
                        if (con_format == "csv") {
                            std::printf("%g,%g,%g,%.12f,%.12f,%.12f", a, b, L, er.mu,
                                        er.lambda_sq, lam);
                            if (con_discrete) std::printf(",%.8f", dls);
                            std::printf("\n");
                        } else {
                            nlohmann::json row{{"alpha", a}, {"beta", b},   {"L", L},
                                               {"mu", er.mu}, {"lambda_sq", er.lambda_sq},
                                               {"Lambda", lam}};
                            if (con_discrete) row["discrete_lambda_sq"] = dls;
                            jtab.push_back(row);
                        }
                    }
            if (con_suite) {
                const Grid g = build_grid(3, 48, 16);
                for (double b : betas)
                    for (double a : alphas) {
                        if (std::isinf(a) || a <= 0.0) continue;
                        const auto reports = verify_korn_suite(a, b, g, con_samples, 2024);
                        for (const auto& r : reports) {
                            if (con_format == "csv")
                                std::printf("suite,%g,%g,%s,%.9f,%.9f,%s\n", a, b,
                                            r.name.c_str(), r.worst_observed_ratio,
                                            r.analytic_constant, r.pass ? "pass" : "FAIL");
                            else
                                jtab.push_back({{"alpha", a}, {"beta", b}, {"check", r.name},
                                                {"worst", r.worst_observed_ratio},
                                                {"constant", r.analytic_constant},
                                                {"pass", r.pass}});
                        }
                        const auto lady = verify_ladyzhenskaya(g, a, con_samples, 7);
                        if (con_format == "csv")
                            std::printf("suite,%g,%g,ladyzhenskaya,%.9f,%.9f,%s\n", a, b,
                                        lady.worst_observed_ratio, lady.analytic_constant,
                                        lady.pass ? "pass" : "FAIL");
                        else
                            jtab.push_back({{"alpha", a}, {"beta", b},
                                            {"check", "ladyzhenskaya"},
                                            {"worst", lady.worst_observed_ratio},
                                            {"constant", lady.analytic_constant},
                                            {"pass", lady.pass}});
                    }
            }
            if (con_format == "json") std::printf("%s\n", jtab.dump(2).c_str());
            return 0;
        }

        if (dim->parsed()) {
            std::printf("alpha,beta,L,nu,kappa,fnorm,bound,dirichlet_reference\n");
            for (double a : parse_list(dim_alpha))
                for (double b : parse_list(dim_beta))
                    for (double L : parse_list(dim_L))
                        for (double nu : parse_list(dim_nu)) {
                            PhysicalParams p{a, std::max(b, 1e-300), nu, L, 1.0};
                            const DimensionBound db =
                                dimension_bound(p, dim_kappa, dim_fnorm, dim_fnorm);
                            std::printf("%g,%g,%g,%g,%g,%g,%.10g,%.10g\n", a, b, L, nu,
                                        dim_kappa, dim_fnorm, db.bound,
                                        db.dirichlet_reference);
                        }
            return 0;
        }

        if (tan->parsed()) {
            RunConfig cfg = make_config(tan_common, tan_over);
            cfg.x_mode = "dirichlet_ends";
            const ScaledSetup s = build_setup(cfg);
            Rng rng(cfg.seed);
            const FlowState u0 = [&] {
                if (s.forcing.h_norm_sq(s.grid, s.beta) == 0.0) return make_state(s.grid);
                Stepper st(s.grid, s.alpha, s.beta, s.stress, s.slip, s.solver);
                return burn_to_attractor(st, make_state(s.grid), s.forcing,
                                         capital_lambda(s.alpha, s.beta, 1.0));
            }();

            // quasidiff table
            FlowState dir = random_stream_state(s.grid, rng);
            const NormReport nd = compute_norms(s.grid, dir, s.alpha, s.beta);
            scale_state(dir, 1.0 / nd.h_norm);
            const auto eps = parse_list(tan_eps);
            const QuasidiffReport rep =
                quasidiff_ratios(s.grid, s.alpha, s.beta, s.stress, s.slip, s.solver, u0,
                                 dir, eps, tan_T, s.forcing);
            std::printf("eps,remainder,remainder_rate\n");
            for (std::size_t k = 0; k < eps.size(); ++k)
                std::printf("%.3e,%.6e,%.6e\n", rep.epsilons[k], rep.remainder[k],
                            rep.remainder_rate[k]);

            // trace estimates
            std::filesystem::create_directories(cfg.out_dir);
            const std::string trace_path = cfg.out_dir + "/trace.csv";
            std::ofstream tf(trace_path);
            tf << "N,q_emp,q_theory,sigma,strategy\n";
            std::printf("N,q_emp,q_theory,sigma,strategy\n");
            std::vector<FamilyStrategy> strategies;
            if (tan_strategy == "random" || tan_strategy == "both")
                strategies.push_back(FamilyStrategy::random_stream);
            if (tan_strategy == "stokes" || tan_strategy == "both")
                strategies.push_back(FamilyStrategy::stokes_modes);
            for (int N : parse_int_list(tan_N))
                for (FamilyStrategy strat : strategies) {
                    const TraceEstimate est = n_trace_estimate(
                        s.grid, s.alpha, s.beta, s.stress, s.slip, s.solver, u0, s.forcing,
                        N, tan_window, strat, cfg.kappa, cfg.seed + N, 4);
                    const char* sname =
                        strat == FamilyStrategy::random_stream ? "random" : "stokes";
                    char line[160];
                    std::snprintf(line, sizeof(line), "%d,%.8f,%.8f,%.3e,%s\n", est.N,
                                  est.q_empirical, est.q_theory, est.sigma, sname);
                    tf << line;
                    std::printf("%s", line);
                }
            return 0;
        }

        if (exh->parsed()) {
            const RunConfig cfg = make_config(exh_common, exh_over);
            const ExhaustionReport rep = run_exhaustion(cfg, parse_int_list(exh_nlist));
            std::printf("n,error\n");
            for (std::size_t k = 0; k < rep.n_list.size(); ++k)
                std::printf("%d,%.10e\n", rep.n_list[k], rep.errors[k]);
            std::printf("reference n = %d, nonincreasing = %s\n", rep.ref_n,
                        rep.nonincreasing ? "yes" : "no");
            return rep.nonincreasing ? 0 : 1;
        }

        if (ver->parsed()) {
            const RunConfig cfg = make_config(ver_common, ver_over);
            const VerificationVerdict verdict = run_verification_suite(cfg);
            std::filesystem::create_directories(cfg.out_dir);
            const std::string path = cfg.out_dir + "/verdict.json";
            std::ofstream out(path);
            out << verdict.to_json().dump(2) << "\n";
            for (const auto& c : verdict.checks)
                std::printf("%-36s %s  %s\n", c.name.c_str(), c.pass ? "pass" : "FAIL",
                            c.detail.c_str());
            std::printf("verdict: %s (%s)\n", verdict.all_pass ? "PASS" : "FAIL",
                        path.c_str());
            return verdict.all_pass ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
