// lattice-heat: command-line front end for the lattice heat solver and its
// experiment harness. Subcommands: stencil, solve, veryweak, uniqueness,
// consistency, limit, verify.
//
// Exit codes: 0 success, 1 criterion failure, 2 config/parse error,
// 3 numeric failure. Every failure prints one machine-readable JSON line on
// stderr. Artifacts are computed fully in memory and then written atomically,
// so a failed run leaves no partial report files.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "latheat/config.hpp"
#include "latheat/fourier.hpp"
#include "latheat/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace latheat;

namespace {

constexpr const char* kToolVersion = "lattice-heat 1.0.0";

[[noreturn]] void die(int code, const std::string& kind, const std::string& detail) {
    json j{{"error", kind}, {"detail", detail}};
    std::cerr << j.dump() << "\n";
    std::exit(code);
}

// Criterion failures still write their artifacts; report the reason and
// translate the pass flag into the exit status.
int finish(bool pass, const std::string& rule) {
    if (!pass) {
        json j{{"error", "criterion"}, {"detail", rule}};
        std::cerr << j.dump() << "\n";
    }
    return pass ? 0 : 1;
}

void apply_workers(int workers) {
#ifdef _OPENMP
    if (workers > 0) omp_set_num_threads(workers);
#else
    (void)workers;
#endif
}

std::string csv_header_with_times(const std::string& param, const NetReport& rep) {
    std::string h = param + ",norm";
    for (double t : rep.output_times) h += ",t=" + format_double(t);
    h += ",note\n";
    return h;
}

std::string report_csv(const std::string& param, const NetReport& rep) {
    std::string out = csv_header_with_times(param, rep);
    for (std::size_t i = 0; i < rep.params.size(); ++i) {
        out += format_double(rep.params[i]) + "," + format_double(rep.norms[i]);
        for (std::size_t c = 0; c < rep.output_times.size(); ++c)
            out += "," + (c < rep.per_time[i].size() ? format_double(rep.per_time[i][c]) : "");
        out += "," + (i < rep.notes.size() ? rep.notes[i] : std::string()) + "\n";
    }
    return out;
}

json fit_json(const NetReport& rep) {
    return json{{"slope", rep.fit.slope},
                {"intercept", rep.fit.intercept},
                {"slope_stderr", rep.fit.slope_stderr},
                {"max_residual", rep.fit.max_abs_residual},
                {"fit_axis", rep.fit_axis},
                {"norm_kind", rep.norm_kind},
                {"all_zero", rep.all_zero},
                {"pass", rep.pass},
                {"pass_rule", rep.pass_rule}};
}

std::string gnuplot_script(const std::string& param, const NetReport& rep) {
    std::ostringstream os;
    os << "set logscale xy\n"
       << "set xlabel \"" << param << "\"\n"
       << "set ylabel \"" << rep.norm_kind << " norm\"\n"
       << "set key left top\n"
       << "fitline(x) = exp(" << format_double(rep.fit.intercept) << ") * x**("
       << format_double(rep.fit.slope) << ")\n"
       << "plot \"report.csv\" using 1:2 with linespoints title \"measured\", \\\n"
       << "     fitline(x) title \"slope " << format_double(rep.fit.slope) << "\"\n";
    return os.str();
}

json manifest_base(const std::string& kind, const Config& cfg, const Scenario& sc) {
    return json{{"tool", kToolVersion},
                {"subcommand", kind},
                {"seed", sc.seed},
                {"workers", sc.workers},
                {"config_text", cfg.source_text()}};
}

void write_sweep_artifacts(const fs::path& dir, const std::string& param, const NetReport& rep,
                           json manifest) {
    fs::create_directories(dir);
    manifest["artifacts"] = json::array({"report.csv", "fit.json", "plot.gp"});
    atomic_write_text(dir / "report.csv", report_csv(param, rep));
    atomic_write_text(dir / "fit.json", fit_json(rep).dump(2) + "\n");
    atomic_write_text(dir / "plot.gp", gnuplot_script(param, rep));
    atomic_write_text(dir / "run-manifest.json", manifest.dump(2) + "\n");
}

Scenario load_scenario(const std::string& config_path, const std::string& out_override,
                       int workers_override, Config& cfg_out) {
    try {
        cfg_out = Config::parse_file(config_path);
        Scenario sc = resolve_scenario(cfg_out);
        if (!out_override.empty()) sc.output_dir = out_override;
        if (workers_override > 0) sc.workers = workers_override;
        apply_workers(sc.workers);
        return sc;
    } catch (const ConfigError& e) {
        die(2, "config-parse", e.what());
    } catch (const invalid_input& e) {
        die(2, "config-parse", e.what());
    }
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns the process exit code.
// ---------------------------------------------------------------------------

int run_stencil(double alpha, int dim, int radius, int quad, const std::string& policy_name,
                const std::string& out, bool no_cache) {
    TailPolicy policy;
    if (policy_name == "raw" || policy_name == "truncate")
        policy = TailPolicy::truncate_report;
    else if (policy_name == "fold")
        policy = TailPolicy::fold_periodic;
    else
        die(2, "config-parse", "stencil: policy must be 'raw' or 'fold'");
    try {
        const StencilKernel k = no_cache
                                    ? stencil_coefficients(alpha, dim, radius, quad, policy)
                                    : cached_stencil_coefficients(alpha, dim, radius, quad, policy);
        write_kernel_csv(k, out);
        std::printf("kernel: alpha=%s n=%d R=%d M=%d policy=%s row_sum=%s tail_mass=%s -> %s\n",
                    format_double(alpha).c_str(), dim, radius, quad, policy_name.c_str(),
                    format_double(k.row_sum()).c_str(), format_double(k.tail_mass).c_str(),
                    out.c_str());
        return 0;
    } catch (const invalid_input& e) {
        die(2, "config-parse", e.what());
    } catch (const std::exception& e) {
        die(3, "numeric", e.what());
    }
}

int run_solve(const std::string& config_path, const std::string& out_override,
              int workers_override) {
    Config cfg;
    Scenario sc = load_scenario(config_path, out_override, workers_override, cfg);
    try {
        const NetProblem& p = sc.net;
        if (p.a.has_atoms() || p.b.has_atoms())
            die(2, "config-parse",
                "solve runs classical coefficients; use veryweak for distributional parts");
        const TimeGrid grid{0.0, p.horizon / p.time_steps, p.time_steps + 1};
        const SampledCoefficient a = sample_direct(p.a, grid);
        const SampledCoefficient b = sample_direct(p.b, grid);
        SourceTerm source = SourceTerm::zero();
        if (p.source_profile)
            source = SourceTerm::separable(*p.source_profile, sample_direct(p.source_time, grid).values);
        strict_positivity_check(a);

        SolveConfig scfg;
        scfg.horizon = p.horizon;
        scfg.time_steps = p.time_steps;
        scfg.alpha = p.alpha;
        scfg.weight_order = p.weight_order;
        scfg.symbol = p.symbol;
        scfg.norm_history = true;
        scfg.keep_spectral = false;
        const Trajectory traj = solve(p.u0, source, a, b, scfg);
        const EstimateReport est = verify_estimate(traj, p.u0, source, a, b, p.weight_order);

        std::string norms = "t,l2_s_norm,energy,estimate_ratio\n";
        for (std::size_t o = 0; o < traj.times.size(); ++o) {
            norms += format_double(traj.times[o]) + "," +
                     format_double(weighted_norm(traj.states[o], p.weight_order)) + "," +
                     format_double(energy(traj, a, p.weight_order, o)) + "," +
                     format_double(est.ratios[o]) + "\n";
        }

        const fs::path dir(sc.output_dir);
        fs::create_directories(dir);
        json manifest = manifest_base("solve", cfg, sc);
        manifest["wellposedness_constant"] = est.constant;
        manifest["max_step_exponent"] = traj.max_step_exponent;
        manifest["estimate_pass"] = est.pass;
        json artifacts = json::array({"norms.csv", "run-manifest.json"});
        if (sc.keep_states) {
            for (std::size_t o = 0; o < traj.states.size(); ++o) {
                char name[32];
                std::snprintf(name, sizeof name, "state-%04zu.lhgf", o);
                write_grid(traj.states[o], dir / name);
                artifacts.push_back(name);
            }
        }
        artifacts.push_back("coefficient-a.csv");
        artifacts.push_back("coefficient-b.csv");
        manifest["artifacts"] = artifacts;
        atomic_write_text(dir / "norms.csv", norms);
        write_coefficient_csv(a, dir / "coefficient-a.csv");
        write_coefficient_csv(b, dir / "coefficient-b.csv");
        atomic_write_text(dir / "run-manifest.json", manifest.dump(2) + "\n");
        return finish(est.pass, "solution estimate ratio exceeds 1 + 1e-8");
    } catch (const positivity_error& e) {
        die(3, "numeric", e.what());
    } catch (const invalid_input& e) {
        die(3, "numeric", e.what());
    } catch (const std::exception& e) {
        die(3, "numeric", e.what());
    }
}

int run_net_experiment(const std::string& kind, const std::string& config_path,
                       const std::string& out_override, int workers_override) {
    Config cfg;
    Scenario sc = load_scenario(config_path, out_override, workers_override, cfg);
    try {
        const Mollifier& moll = Mollifier::standard();
        NetReport rep;
        json manifest = manifest_base(kind, cfg, sc);
        std::vector<double> omegas;
        for (double e : sc.eps_grid) omegas.push_back(sc.schedule(e));
        manifest["eps"] = sc.eps_grid;
        manifest["omega"] = omegas;
        manifest["omega_schedule"] = sc.schedule.describe();

        if (kind == "veryweak") {
            rep = very_weak_solve(sc.net, sc.eps_grid, moll, sc.schedule);
        } else if (kind == "uniqueness") {
            rep = uniqueness_experiment(sc.net, sc.eps_grid, moll, sc.schedule, sc.q, sc.perturb);
            manifest["q"] = sc.q;
        } else if (kind == "consistency") {
            ConsistencyResult res = consistency_experiment(sc.net, sc.eps_grid, moll, sc.schedule);
            manifest["classical_norm"] = res.classical_norm;
            rep = res.report;
        } else {
            die(2, "config-parse", "unknown net experiment kind " + kind);
        }
        write_sweep_artifacts(sc.output_dir, "eps", rep, manifest);
        return finish(rep.pass, rep.pass_rule);
    } catch (const ConfigError& e) {
        die(2, "config-parse", e.what());
    } catch (const std::exception& e) {
        die(3, "numeric", e.what());
    }
}

int run_limit(const std::string& config_path, const std::string& out_override,
              int workers_override) {
    Config cfg;
    Scenario sc = load_scenario(config_path, out_override, workers_override, cfg);
    try {
        const NetReport rep = semiclassical_experiment(sc.limit, Mollifier::standard());
        json manifest = manifest_base("limit", cfg, sc);
        manifest["alpha"] = sc.limit.alpha;
        manifest["base_points"] = sc.limit.base_points;
        if (sc.limit.fixed_eps) manifest["fixed_eps"] = *sc.limit.fixed_eps;
        write_sweep_artifacts(sc.output_dir, "hbar", rep, manifest);
        return finish(rep.pass, rep.pass_rule);
    } catch (const invalid_input& e) {
        die(2, "config-parse", e.what());
    } catch (const std::exception& e) {
        die(3, "numeric", e.what());
    }
}

int run_verify(const std::string& config_path, const std::string& out_override,
               int workers_override) {
    Config cfg;
    Scenario sc = load_scenario(config_path, out_override, workers_override, cfg);
    try {
        Rng rng(sc.seed);
        const LatticeSpec spec = sc.net.spec;
        const int nt = sc.net.time_steps;
        const double T = sc.net.horizon;
        const TimeGrid grid{0.0, T / nt, nt + 1};

        std::string csv = "trial,s,constant,max_ratio,pass\n";
        bool all_pass = true;
        for (int trial = 0; trial < sc.trials; ++trial) {
            CoefficientModel a;
            a.regular.kind = RegularPart::Kind::oscillation;
            a.regular.base = rng.uniform(1.0, 2.0);
            a.regular.amplitude = rng.uniform(0.0, a.regular.base - 0.5);
            a.regular.omega = rng.uniform(0.5, 6.0);
            CoefficientModel b;
            b.regular.kind = RegularPart::Kind::oscillation;
            b.regular.base = rng.uniform(-0.5, 0.5);
            b.regular.amplitude = rng.uniform(0.0, 0.5);
            b.regular.omega = rng.uniform(0.5, 6.0);
            const double s = trial % 2 == 0 ? 0.0 : 1.0;

            GridFunction u0 = random_grid(spec, rng);
            GridFunction prof = random_grid(spec, rng);
            CoefficientModel ft;
            ft.regular.kind = RegularPart::Kind::oscillation;
            ft.regular.base = rng.uniform(-1.0, 1.0);
            ft.regular.amplitude = rng.uniform(0.0, 1.0);
            ft.regular.omega = rng.uniform(0.5, 6.0);

            const SampledCoefficient as = sample_direct(a, grid);
            const SampledCoefficient bs = sample_direct(b, grid);
            const SourceTerm source = SourceTerm::separable(prof, sample_direct(ft, grid).values);

            SolveConfig scfg;
            scfg.horizon = T;
            scfg.time_steps = nt;
            scfg.alpha = sc.net.alpha;
            scfg.weight_order = s;
            scfg.symbol = sc.net.symbol;
            const Trajectory traj = solve(u0, source, as, bs, scfg);
            const EstimateReport est = verify_estimate(traj, u0, source, as, bs, s);
            all_pass = all_pass && est.pass;
            csv += std::to_string(trial) + "," + format_double(s) + "," +
                   format_double(est.constant) + "," + format_double(est.max_ratio) + "," +
                   (est.pass ? "1" : "0") + "\n";
        }

        const fs::path dir(sc.output_dir);
        fs::create_directories(dir);
        json manifest = manifest_base("verify", cfg, sc);
        manifest["trials"] = sc.trials;
        manifest["artifacts"] = json::array({"verify.csv", "run-manifest.json"});
        atomic_write_text(dir / "verify.csv", csv);
        atomic_write_text(dir / "run-manifest.json", manifest.dump(2) + "\n");
        return finish(all_pass, "some trial violated the solution estimate");
    } catch (const std::exception& e) {
        die(3, "numeric", e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral solver and experiment harness for the fractional heat equation on "
                 "scaled periodic lattices"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    // stencil
    double alpha = 1.0;
    int dim = 1, radius = 1, quad = 0;
    std::string policy = "raw", out_file = "kernel.csv";
    bool no_cache = false;
    CLI::App* stencil = app.add_subcommand("stencil", "Generate stencil coefficients as CSV");
    stencil->add_option("--alpha", alpha, "fractional order")->required();
    stencil->add_option("-n,--dim", dim, "dimension")->required();
    stencil->add_option("-R,--radius", radius, "kept radius")->required();
    stencil->add_option("-M,--quad", quad, "quadrature points per axis (default 8*max(R,64))");
    stencil->add_option("--policy", policy, "tail policy: raw | fold");
    stencil->add_option("-o,--out", out_file, "output CSV path");
    stencil->add_flag("--no-cache", no_cache, "skip the kernel cache");

    // config-driven subcommands
    std::string config_path, out_dir;
    int workers = 0;
    auto add_cfg = [&](const char* name, const char* blurb) {
        CLI::App* cmd = app.add_subcommand(name, blurb);
        cmd->add_option("-c,--config", config_path, "scenario config file")->required();
        cmd->add_option("-o,--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--workers", workers, "worker thread budget");
        return cmd;
    };
    CLI::App* solve_cmd = add_cfg("solve", "Single classical solve with norm trace");
    CLI::App* veryweak = add_cfg("veryweak", "Regularized-net existence/moderateness sweep");
    CLI::App* uniqueness = add_cfg("uniqueness", "Negligible-perturbation decay sweep");
    CLI::App* consistency = add_cfg("consistency", "Net-vs-classical convergence sweep");
    CLI::App* limit = add_cfg("limit", "Small-spacing limit sweep");
    CLI::App* verify = add_cfg("verify", "Randomized well-posedness estimate verification");

    CLI11_PARSE(app, argc, argv);

    if (stencil->parsed()) {
        if (quad == 0) quad = 8 * std::max(radius, 64);
        return run_stencil(alpha, dim, radius, quad, policy, out_file, no_cache);
    }
    if (solve_cmd->parsed()) return run_solve(config_path, out_dir, workers);
    if (veryweak->parsed()) return run_net_experiment("veryweak", config_path, out_dir, workers);
    if (uniqueness->parsed())
        return run_net_experiment("uniqueness", config_path, out_dir, workers);
    if (consistency->parsed())
        return run_net_experiment("consistency", config_path, out_dir, workers);
    if (limit->parsed()) return run_limit(config_path, out_dir, workers);
    if (verify->parsed()) return run_verify(config_path, out_dir, workers);
    return 2;
}
