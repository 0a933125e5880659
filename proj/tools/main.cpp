// conewell CLI: simulate | preset | sweep | check
//
// Drives the cone pseudo-parabolic simulator from JSON run configurations,
// reproduces the named theorem-regime presets, sweeps one config axis into a
// phase table, and re-runs the diagnostics on a stored run directory.
// Exit code is 0 iff every gating check passed.

#include <CLI11.hpp>

#include "conewell/scenarios.hpp"

#include <cstdio>
#include <iostream>

namespace {

using namespace conewell;

void print_initial(const RunResult& r) {
    std::printf("initial: J0=%.9g I0=%.9g S0=%.9g H2_0=%.9g class=%s d_est=%.9g\n",
                r.initial.report.J, r.initial.report.I, r.initial.report.S, r.initial.report.H2,
                to_string(r.initial.report.nehari_class), r.initial.d_est);
}

void print_result(const RunResult& r, bool quiet) {
    if (!quiet) {
        print_initial(r);
        const TrajectoryRow& last = r.trajectory.rows.back();
        std::printf("run: outcome=%s rows=%zu t_last=%.9g H2_last=%.9g\n",
                    to_string(r.trajectory.outcome), r.trajectory.rows.size(), last.t, last.H2);
        if (r.trajectory.outcome == Outcome::BlowUp)
            std::printf("run: t_blowup_est=%.9g (heuristic fit, not the exact blow-up time)\n",
                        r.trajectory.t_blowup_est);
    }
    for (const CheckReport& rep : r.reports) std::fputs(to_record(rep).c_str(), stdout);
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, long seed,
                 bool quiet) {
    RunConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output.directory = out_dir;
    if (seed >= 0) cfg.initial.seed = static_cast<std::uint64_t>(seed);
    cfg.output.quiet = quiet;
    RunResult r = execute(cfg);
    print_result(r, quiet);
    return r.gating_ok ? 0 : 1;
}

int cmd_preset(const std::string& name, const std::string& out_dir, int jobs, bool quiet) {
    if (preset_is_sweep(name)) {
        RunConfig tpl = preset_config(name);
        SweepResult res =
            sweep(tpl, "initial.amplitude", preset_sweep_values(name), out_dir, jobs, quiet);
        int inconclusive = 0;
        for (const SweepRow& row : res.rows) {
            std::printf("sweep value=%.6g outcome=%s sminus=%d J0=%.6g I0=%.6g%s\n", row.value,
                        to_string(row.outcome), row.sminus ? 1 : 0, row.J0, row.I0,
                        row.inconclusive ? " INCONCLUSIVE" : "");
            inconclusive += row.inconclusive ? 1 : 0;
        }
        std::printf("dichotomy: %s (%d inconclusive)\n", res.gating_ok ? "consistent" : "VIOLATED",
                    inconclusive);
        return res.gating_ok ? 0 : 1;
    }
    RunResult r = run_preset(name, out_dir, quiet);
    print_result(r, quiet);
    return r.gating_ok ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& axis,
              const std::vector<double>& values, const std::string& out_dir, int jobs,
              bool quiet) {
    RunConfig tpl = load_config(config_path);
    SweepResult res = sweep(tpl, axis, values, out_dir, jobs, quiet);
    for (const SweepRow& row : res.rows)
        std::printf("sweep value=%.6g outcome=%s t_est=%.6g J0=%.6g I0=%.6g S0=%.6g\n", row.value,
                    to_string(row.outcome), row.t_est, row.J0, row.I0, row.S0);
    return res.gating_ok ? 0 : 1;
}

int cmd_check(const std::string& run_dir) {
    std::vector<CheckReport> reports = check_stored_run(run_dir);
    bool ok = true;
    for (const CheckReport& r : reports) {
        std::fputs(to_record(r).c_str(), stdout);
        ok = ok && r.status != CheckStatus::Fail;
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal pseudo-parabolic cone simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, preset_name, axis = "initial.amplitude", run_dir;
    std::vector<double> values;
    long seed = -1;
    int jobs = 1;
    bool quiet = false;

    CLI::App* sim = app.add_subcommand("simulate", "run one configuration");
    sim->add_option("--config", config_path, "JSON run configuration")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--seed", seed, "override initial.seed");
    sim->add_flag("--quiet", quiet);

    CLI::App* pre = app.add_subcommand("preset", "run a named preset");
    pre->add_option("name", preset_name, "preset name")->required();
    pre->add_option("--out", out_dir, "output directory");
    pre->add_option("--jobs", jobs, "parallel runs for sweep presets");
    pre->add_flag("--quiet", quiet);

    CLI::App* sw = app.add_subcommand("sweep", "sweep one config axis");
    sw->add_option("--config", config_path, "JSON template configuration")->required();
    sw->add_option("--axis", axis, "dotted config path, e.g. initial.amplitude");
    sw->add_option("--values", values, "axis values")->required()->delimiter(',');
    sw->add_option("--out", out_dir, "output directory");
    sw->add_option("--jobs", jobs, "parallel runs");
    sw->add_flag("--quiet", quiet);

    CLI::App* chk = app.add_subcommand("check", "re-run diagnostics on a stored run");
    chk->add_option("--run", run_dir, "run directory (config.json + trajectory.csv)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, seed, quiet);
        if (pre->parsed()) return cmd_preset(preset_name, out_dir, jobs, quiet);
        if (sw->parsed()) return cmd_sweep(config_path, axis, values, out_dir, jobs, quiet);
        if (chk->parsed()) return cmd_check(run_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
