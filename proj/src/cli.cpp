#include "sirlevy/cli.hpp"

#include "sirlevy/analysis.hpp"
#include "sirlevy/config.hpp"
#include "sirlevy/errors.hpp"
#include "sirlevy/integrator.hpp"
#include "sirlevy/model.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>

namespace sirlevy {

namespace {

namespace fs = std::filesystem;

struct Loaded {
    ScenarioConfig config;
    std::string stem; ///< preset name or config file stem, used for output names
};

Loaded resolve_config(const std::string& arg) {
    if (auto p = preset(arg)) return {*p, arg};
    const fs::path path(arg);
    return {load_config(path), path.stem().string()};
}

void print_row(const char* label, double value) {
    std::cout << "  " << std::left << std::setw(24) << label << format_double(value) << "\n";
}

RunReport base_report(const ScenarioConfig& cfg) {
    RunReport r;
    r.config = cfg;
    r.thresholds = threshold_report(cfg.model, cfg.noise);
    r.hypotheses = validate_hypotheses(cfg.model, cfg.noise);
    r.provenance = make_provenance(cfg.sim.seed);
    return r;
}

int cmd_thresholds(const std::string& cfg_arg, const std::string& out_dir) {
    const Loaded in = resolve_config(cfg_arg);
    const RunReport report = base_report(in.config);
    const FullThresholdReport& t = report.thresholds;

    std::cout << "scenario: " << in.stem << " (mode " << to_string(in.config.mode) << ")\n";
    if (t.extinction) {
        const ExtinctionThresholds& e = *t.extinction;
        print_row("t_star", e.t_star);
        print_row("upsilon", e.upsilon);
        print_row("pi_term", e.pi_term);
        print_row("sigma_term", e.sigma_term);
        print_row("lambda_term", e.lambda_term);
        print_row("chi2", e.chi2);
        print_row("theta", e.theta);
    } else {
        std::cout << "  extinction side unavailable: " << t.extinction_error << "\n";
        print_row("t_star", basic_reproduction_number(in.config.model));
    }
    const PersistenceThresholds& p = t.persistence;
    print_row("sbar1", p.sbar1);
    print_row("sbar2", p.sbar2);
    print_row("sbar4", p.sbar4);
    print_row("t_tilde", p.t_tilde);
    print_row("c1", p.c1);
    print_row("c2", p.c2);
    print_row("c3", p.c3);
    print_row("persistence_lower_bound", p.persistence_lower_bound);
    std::cout << "  regime                  " << to_string(t.regime) << "\n";
    for (const auto& h : report.hypotheses)
        std::cout << "  " << h.name << ": " << (h.satisfied ? "ok" : "FAILED") << " ("
                  << h.detail << ")\n";

    const fs::path out = resolve_output_dir(out_dir) / (in.stem + "_thresholds.json");
    write_report(out, report);
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

Trajectory run_scenario(const ScenarioConfig& cfg, bool couple_psi = false) {
    if (cfg.mode == Mode::Deterministic)
        return simulate_deterministic(cfg.initial, cfg.model, cfg.sim);
    return simulate(cfg.initial, cfg.model, cfg.noise, cfg.sim, couple_psi);
}

void attach_verdicts(RunReport& report, const Trajectory& traj, const ScenarioConfig& cfg) {
    report.extinction =
        extinction_verdict(traj, cfg.model, cfg.analysis.epsilon, cfg.analysis.tail_fraction);
    const Window window = effective_window(cfg.analysis, cfg.sim.horizon);
    const double bound =
        persistence_report(cfg.model, cfg.noise).persistence_lower_bound;
    report.persistence = persistence_verdict(traj, window, bound);
}

int cmd_simulate(const std::string& cfg_arg, const std::string& out_dir, bool couple_psi) {
    const Loaded in = resolve_config(cfg_arg);
    const fs::path dir = resolve_output_dir(out_dir);

    const Trajectory traj = run_scenario(in.config, couple_psi);
    const fs::path csv = dir / (in.stem + "_trajectory.csv");
    write_trajectory_csv(csv, traj);

    RunReport report = base_report(in.config);
    attach_verdicts(report, traj, in.config);
    const fs::path rep = dir / (in.stem + "_run.json");
    write_report(rep, report);

    std::cout << "final state: S=" << format_double(traj.states.back().s)
              << " I=" << format_double(traj.states.back().i)
              << " D=" << format_double(traj.states.back().d) << "\n"
              << "extinct: " << (report.extinction->extinct ? "yes" : "no")
              << " (final I " << format_double(report.extinction->final_i) << ", slope "
              << format_double(report.extinction->slope) << ")\n"
              << "persistent: " << (report.persistence->persistent ? "yes" : "no")
              << " (tail mean I " << format_double(report.persistence->tail_mean_i)
              << " vs bound " << format_double(report.persistence->bound) << ")\n"
              << "clamped steps: " << traj.clamped_steps << "\n"
              << "wrote " << csv.string() << "\n"
              << "wrote " << rep.string() << "\n";
    return 0;
}

int cmd_ensemble(const std::string& cfg_arg, const std::string& out_dir,
                 std::size_t seeds_override) {
    const Loaded in = resolve_config(cfg_arg);
    const ScenarioConfig& cfg = in.config;
    if (cfg.mode == Mode::Deterministic)
        throw ValidationError("ensemble needs a stochastic mode (deterministic runs are "
                              "identical across seeds)");
    const std::size_t n = seeds_override > 0 ? seeds_override : cfg.analysis.n_seeds;

    const EnsembleSummary summary =
        run_ensemble(cfg.model, cfg.noise, cfg.initial, cfg.sim, n, cfg.analysis);

    RunReport report = base_report(cfg);
    report.ensemble = summary;
    const fs::path out = resolve_output_dir(out_dir) / (in.stem + "_ensemble.json");
    write_report(out, report);

    std::cout << "runs: " << summary.n_runs << "\n"
              << "fraction extinct:    " << format_double(summary.fraction_extinct) << "\n"
              << "fraction persistent: " << format_double(summary.fraction_persistent)
              << " (bound " << format_double(summary.persistence_bound) << ")\n"
              << "median slope:        " << format_double(summary.slope.q50) << "\n"
              << "mean tail I:         " << format_double(summary.tail_mean_i.mean) << "\n"
              << "wrote " << out.string() << "\n";
    return 0;
}

int cmd_verify_lemma2(const std::string& cfg_arg, const std::string& out_dir,
                      std::size_t seeds_override) {
    const Loaded in = resolve_config(cfg_arg);
    const ScenarioConfig& cfg = in.config;
    const std::size_t n = seeds_override > 0 ? seeds_override : cfg.analysis.n_seeds;

    const LemmaVerdict verdict =
        verify_lemma2(cfg.model, cfg.noise, cfg.sim, cfg.initial.s, n,
                      cfg.analysis.mean_tolerance, cfg.analysis.square_tolerance);

    RunReport report = base_report(cfg);
    report.lemma2 = verdict;
    const fs::path out = resolve_output_dir(out_dir) / (in.stem + "_lemma2.json");
    write_report(out, report);

    std::cout << "<psi>  : " << format_double(verdict.mean_estimate) << " vs "
              << format_double(verdict.mean_target) << " (rel err "
              << format_double(verdict.mean_rel_error) << ", "
              << (verdict.mean_ok ? "ok" : "FAILED") << ")\n"
              << "<psi^2>: " << format_double(verdict.square_estimate) << " vs "
              << format_double(verdict.square_target) << " (rel err "
              << format_double(verdict.square_rel_error) << ", "
              << (verdict.square_ok ? "ok" : "FAILED") << ")\n"
              << "wrote " << out.string() << "\n";
    return 0;
}

int cmd_reproduce(const std::string& figure, const std::string& out_dir) {
    const auto base = preset(figure);
    if (!base) throw ValidationError("reproduce expects one of fig1, fig2, fig3, fig4");
    const fs::path dir = resolve_output_dir(out_dir);

    const bool three_modes = figure == "fig3" || figure == "fig4";
    std::vector<Mode> modes;
    if (three_modes)
        modes = {Mode::Deterministic, Mode::DegenerateDiffusion, Mode::Full};
    else
        modes = {Mode::Full};

    for (Mode mode : modes) {
        const ScenarioConfig cfg = apply_mode(*base, mode);
        const std::string tag =
            mode == Mode::Deterministic ? "deterministic"
            : mode == Mode::DegenerateDiffusion ? "degenerate"
                                                : "full";
        const Trajectory traj = run_scenario(cfg);

        const fs::path csv = dir / (figure + "_" + tag + ".csv");
        write_trajectory_csv(csv, traj);

        RunReport report = base_report(cfg);
        attach_verdicts(report, traj, cfg);
        const fs::path rep = dir / (figure + "_" + tag + ".json");
        write_report(rep, report);

        std::cout << figure << " " << tag << ": final I="
                  << format_double(traj.states.back().i) << ", tail mean I="
                  << format_double(report.persistence->tail_mean_i) << "\n"
                  << "wrote " << csv.string() << "\n"
                  << "wrote " << rep.string() << "\n";
    }
    return 0;
}

int cmd_scan(const std::string& cfg_arg, const std::string& out_dir,
             const std::string& param, double from, double to, int steps) {
    const Loaded in = resolve_config(cfg_arg);
    const auto rows = scan_param(in.config, param, from, to, steps);
    const fs::path out =
        resolve_output_dir(out_dir) / (in.stem + "_scan_" + param + ".csv");
    write_scan_csv(out, rows);
    std::cout << "scanned " << param << " over [" << format_double(from) << ", "
              << format_double(to) << "] in " << steps << " step(s)\n"
              << "wrote " << out.string() << "\n";
    return 0;
}

} // namespace

int run_command(int argc, char** argv) {
    CLI::App app{"Stochastic SIR toolkit: delayed transmission, Brownian noise, "
                 "compensated multiplicative jumps"};
    app.require_subcommand(1);
    app.footer("Configs are JSON files or preset names (fig1..fig4). Outputs land in\n"
               "--out, else $SIRLEVY_OUTPUT_DIR, else the current directory.");

    std::string out_dir;
    app.add_option("--out", out_dir, "output directory")->expected(1);

    std::string cfg_arg;
    std::size_t seeds = 0;
    bool couple_psi = false;
    std::string param;
    double from = 0.0, to = 0.0;
    int steps = 10;
    std::string figure;

    // fallthrough lets --out appear after the subcommand name as well.
    auto* th = app.add_subcommand("thresholds", "threshold report for a config/preset");
    th->fallthrough();
    th->add_option("config", cfg_arg, "JSON config path or preset name")->required();

    auto* sim = app.add_subcommand("simulate", "single trajectory to CSV");
    sim->fallthrough();
    sim->add_option("config", cfg_arg, "JSON config path or preset name")->required();
    sim->add_flag("--psi", couple_psi, "couple the auxiliary bound process");

    auto* ens = app.add_subcommand("ensemble", "Monte Carlo ensemble to JSON");
    ens->fallthrough();
    ens->add_option("config", cfg_arg, "JSON config path or preset name")->required();
    ens->add_option("--seeds", seeds, "number of members (default: config n_seeds)");

    auto* lem = app.add_subcommand("verify-lemma2",
                                   "check the auxiliary-process time-average limits");
    lem->fallthrough();
    lem->add_option("config", cfg_arg, "JSON config path or preset name")->required();
    lem->add_option("--seeds", seeds, "number of members (default: config n_seeds)");

    auto* rep = app.add_subcommand("reproduce", "run a canned figure scenario");
    rep->fallthrough();
    rep->add_option("figure", figure, "fig1, fig2, fig3 or fig4")->required();

    auto* scn = app.add_subcommand("scan", "sweep one parameter, thresholds per value");
    scn->fallthrough();
    scn->add_option("config", cfg_arg, "JSON config path or preset name")->required();
    scn->add_option("--param", param, "A, mu1, mu2, gamma, beta, eta, sigma1, sigma2, sigma4")
        ->required();
    scn->add_option("--from", from, "first value")->required();
    scn->add_option("--to", to, "last value")->required();
    scn->add_option("--steps", steps, "number of values (default 10)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (th->parsed()) return cmd_thresholds(cfg_arg, out_dir);
        if (sim->parsed()) return cmd_simulate(cfg_arg, out_dir, couple_psi);
        if (ens->parsed()) return cmd_ensemble(cfg_arg, out_dir, seeds);
        if (lem->parsed()) return cmd_verify_lemma2(cfg_arg, out_dir, seeds);
        if (rep->parsed()) return cmd_reproduce(figure, out_dir);
        if (scn->parsed()) return cmd_scan(cfg_arg, out_dir, param, from, to, steps);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const NonFiniteState& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        // Remaining domain errors (degenerate diffusion, chi2 <= 0, bad moment
        // order, empty windows) are all misuse of the inputs.
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace sirlevy
