#include "conewell/scenarios.hpp"

#include <nlohmann/json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;
using nlohmann::json;

namespace conewell {

const char* to_string(InitialKind k) {
    switch (k) {
        case InitialKind::Eigenmode: return "eigenmode";
        case InitialKind::GaussianBump: return "gaussian_bump";
        case InitialKind::Dipole: return "dipole";
        case InitialKind::FromSnapshot: return "from_snapshot";
    }
    return "?";
}

InitialKind initial_kind_from_string(const std::string& s) {
    if (s == "eigenmode") return InitialKind::Eigenmode;
    if (s == "gaussian_bump") return InitialKind::GaussianBump;
    if (s == "dipole") return InitialKind::Dipole;
    if (s == "from_snapshot") return InitialKind::FromSnapshot;
    throw std::invalid_argument("unknown initial kind '" + s + "'");
}

void RunConfig::validate() const {
    if (!(grid.L > 0.0)) throw std::invalid_argument("config: grid.L must be > 0");
    if (grid.Ns < 4 || grid.Ntheta < 4)
        throw std::invalid_argument("config: grid.Ns and grid.Ntheta must be >= 4");
    params.validate();
    stepper.validate();
    if (initial.amplitude == 0.0)
        throw std::invalid_argument("config: initial.amplitude must be nonzero");
    if (initial.kind == InitialKind::Eigenmode) {
        const int kmin = grid.tip_bc == TipBc::DirichletTip ? 1 : 0;
        if (initial.mode_k < kmin || initial.mode_m < 0)
            throw std::invalid_argument("config: invalid eigenmode indices");
    }
    if (initial.kind == InitialKind::GaussianBump || initial.kind == InitialKind::Dipole) {
        if (!(initial.width > 0.0))
            throw std::invalid_argument("config: initial.width must be > 0");
    }
    if (initial.kind == InitialKind::FromSnapshot && initial.snapshot_path.empty())
        throw std::invalid_argument("config: initial.snapshot_path required for from_snapshot");
    for (const CheckSpec& c : checks) {
        static const char* known[] = {"dissipation",       "conservation", "gronwall",
                                      "growth_lower_bound", "nminus_invariance",
                                      "global_bound",       "l2_monotone"};
        bool ok = false;
        for (const char* k : known) ok = ok || c.name == k;
        if (!ok) throw std::invalid_argument("config: unknown check '" + c.name + "'");
        if (c.tol < 0.0) throw std::invalid_argument("config: check tolerance must be >= 0");
    }
    if (output.snapshot_every < 0)
        throw std::invalid_argument("config: output.snapshot_every must be >= 0");
}

// ---------------------------------------------------------------- JSON I/O

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* block) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok)
            throw std::invalid_argument(std::string("config: unknown key '") + it.key() +
                                        "' in block " + block);
    }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

RunConfig config_from_json_text(const std::string& text) {
    json j = json::parse(text);
    reject_unknown(j, {"grid", "params", "stepper", "initial", "checks", "output"}, "<root>");
    RunConfig c;
    if (j.contains("grid")) {
        const json& g = j["grid"];
        reject_unknown(g, {"L", "Ns", "Ntheta", "tip_bc"}, "grid");
        get_if(g, "L", c.grid.L);
        get_if(g, "Ns", c.grid.Ns);
        get_if(g, "Ntheta", c.grid.Ntheta);
        if (g.contains("tip_bc")) c.grid.tip_bc = tip_bc_from_string(g["tip_bc"].get<std::string>());
    }
    if (j.contains("params")) {
        const json& g = j["params"];
        reject_unknown(g, {"p", "n", "nonlocal_on", "source_on"}, "params");
        get_if(g, "p", c.params.p);
        get_if(g, "n", c.params.n);
        get_if(g, "nonlocal_on", c.params.nonlocal_on);
        get_if(g, "source_on", c.params.source_on);
    }
    if (j.contains("stepper")) {
        const json& g = j["stepper"];
        reject_unknown(g,
                       {"dt0", "dt_min", "dt_max", "t_end", "growth_cap", "blowup_threshold",
                        "linear_tol", "snapshot_every"},
                       "stepper");
        get_if(g, "dt0", c.stepper.dt0);
        get_if(g, "dt_min", c.stepper.dt_min);
        get_if(g, "dt_max", c.stepper.dt_max);
        get_if(g, "t_end", c.stepper.t_end);
        get_if(g, "growth_cap", c.stepper.growth_cap);
        get_if(g, "blowup_threshold", c.stepper.blowup_threshold);
        get_if(g, "linear_tol", c.stepper.linear_tol);
        get_if(g, "snapshot_every", c.stepper.snapshot_every);
    }
    if (j.contains("initial")) {
        const json& g = j["initial"];
        reject_unknown(g,
                       {"kind", "amplitude", "center_s", "center_theta", "width", "mode_k",
                        "mode_m", "seed", "snapshot_path"},
                       "initial");
        if (g.contains("kind")) c.initial.kind = initial_kind_from_string(g["kind"].get<std::string>());
        get_if(g, "amplitude", c.initial.amplitude);
        get_if(g, "center_s", c.initial.center_s);
        get_if(g, "center_theta", c.initial.center_theta);
        get_if(g, "width", c.initial.width);
        get_if(g, "mode_k", c.initial.mode_k);
        get_if(g, "mode_m", c.initial.mode_m);
        get_if(g, "seed", c.initial.seed);
        get_if(g, "snapshot_path", c.initial.snapshot_path);
    }
    if (j.contains("checks")) {
        for (const json& e : j["checks"]) {
            reject_unknown(e, {"name", "tol"}, "checks[]");
            CheckSpec cs;
            cs.name = e.at("name").get<std::string>();
            get_if(e, "tol", cs.tol);
            c.checks.push_back(cs);
        }
    }
    if (j.contains("output")) {
        const json& g = j["output"];
        reject_unknown(g, {"directory", "snapshot_every", "quiet"}, "output");
        get_if(g, "directory", c.output.directory);
        get_if(g, "snapshot_every", c.output.snapshot_every);
        get_if(g, "quiet", c.output.quiet);
    }
    c.validate();
    return c;
}

std::string config_to_json_text(const RunConfig& c) {
    json j;
    j["grid"] = {{"L", c.grid.L},
                 {"Ns", c.grid.Ns},
                 {"Ntheta", c.grid.Ntheta},
                 {"tip_bc", to_string(c.grid.tip_bc)}};
    j["params"] = {{"p", c.params.p},
                   {"n", c.params.n},
                   {"nonlocal_on", c.params.nonlocal_on},
                   {"source_on", c.params.source_on}};
    j["stepper"] = {{"dt0", c.stepper.dt0},
                    {"dt_min", c.stepper.dt_min},
                    {"dt_max", c.stepper.dt_max},
                    {"t_end", c.stepper.t_end},
                    {"growth_cap", c.stepper.growth_cap},
                    {"blowup_threshold", c.stepper.blowup_threshold},
                    {"linear_tol", c.stepper.linear_tol},
                    {"snapshot_every", c.stepper.snapshot_every}};
    j["initial"] = {{"kind", to_string(c.initial.kind)},
                    {"amplitude", c.initial.amplitude},
                    {"center_s", c.initial.center_s},
                    {"center_theta", c.initial.center_theta},
                    {"width", c.initial.width},
                    {"mode_k", c.initial.mode_k},
                    {"mode_m", c.initial.mode_m},
                    {"seed", c.initial.seed},
                    {"snapshot_path", c.initial.snapshot_path}};
    j["checks"] = json::array();
    for (const CheckSpec& cs : c.checks) j["checks"].push_back({{"name", cs.name}, {"tol", cs.tol}});
    j["output"] = {{"directory", c.output.directory},
                   {"snapshot_every", c.output.snapshot_every},
                   {"quiet", c.output.quiet}};
    return j.dump(2) + "\n";
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

// ------------------------------------------------------------ initial data

namespace {

double wrapped(double theta, double center) { return std::remainder(theta - center, 2.0 * M_PI); }

void fill_bump(const ConeGrid& grid, Field& u, double cs, double ct, double w, double sign) {
    for (int i = 0; i < grid.Ns; ++i)
        for (int j = 0; j < grid.Ntheta; ++j) {
            const double ds = grid.s(i) - cs;
            const double dt = wrapped(grid.theta(j), ct);
            u.values(grid.index(i, j)) += sign * std::exp(-(ds * ds + dt * dt) / (2.0 * w * w));
        }
}

} // namespace

Field make_initial(const ConeGrid& grid, const DiscreteOperators& ops, const InitialSpec& spec) {
    if (spec.amplitude == 0.0)
        throw std::invalid_argument("make_initial: amplitude must be nonzero");
    Field u = make_field(grid);
    switch (spec.kind) {
        case InitialKind::Eigenmode: {
            const double kappa = grid.tip_bc == TipBc::DirichletTip
                                     ? (2.0 * spec.mode_k - 1.0) * M_PI / (2.0 * grid.L)
                                     : spec.mode_k * M_PI / grid.L;
            for (int i = 0; i < grid.Ns; ++i) {
                // Dirichlet profile vanishes at s = -L, Neumann profile has
                // zero slope there; both have zero slope at s = 0.
                const double prof = grid.tip_bc == TipBc::DirichletTip
                                        ? std::cos(kappa * grid.s(i))
                                        : std::cos(kappa * (grid.s(i) + grid.L));
                for (int j = 0; j < grid.Ntheta; ++j) {
                    const double ang =
                        spec.mode_m == 0 ? 1.0 : std::cos(spec.mode_m * grid.theta(j));
                    u.values(grid.index(i, j)) = prof * ang;
                }
            }
            break;
        }
        case InitialKind::GaussianBump:
            fill_bump(grid, u, spec.center_s, spec.center_theta, spec.width, 1.0);
            break;
        case InitialKind::Dipole:
            // bump minus its theta-reflected copy: the quadrature weights are
            // uniform, so the integral cancels to machine precision
            fill_bump(grid, u, spec.center_s, spec.center_theta, spec.width, 1.0);
            fill_bump(grid, u, spec.center_s, spec.center_theta + M_PI, spec.width, -1.0);
            break;
        case InitialKind::FromSnapshot: {
            SnapshotFile snap = read_snapshot(spec.snapshot_path);
            if (snap.Ns != grid.Ns || snap.Ntheta != grid.Ntheta || snap.L != grid.L ||
                snap.tip_bc != grid.tip_bc)
                throw std::invalid_argument("make_initial: snapshot grid does not match");
            for (int k = 0; k < grid.node_count(); ++k) u.values(k) = snap.values[k];
            break;
        }
    }
    (void)ops;
    u.values *= spec.amplitude;
    return u;
}

// ----------------------------------------------------------------- execute

namespace {

std::size_t first_nminus_index(const Trajectory& traj) {
    for (std::size_t k = 0; k < traj.rows.size(); ++k)
        if (traj.rows[k].I < -kNehariTol * std::max(1.0, traj.rows[k].H2)) return k;
    return 0;
}

std::vector<CheckReport> run_checks(const RunConfig& cfg, const Trajectory& traj,
                                    const ConeGrid& grid, const DiscreteOperators& ops) {
    std::vector<CheckReport> out;
    for (const CheckSpec& cs : cfg.checks) {
        if (cs.name == "dissipation") {
            out.push_back(check_dissipation(traj, cs.tol > 0.0 ? cs.tol : 1e-10));
            if (auto info = dissipation_identity_report(traj, grid, ops, cfg.params))
                out.push_back(*info);
        } else if (cs.name == "conservation") {
            double tol = cs.tol;
            if (tol == 0.0) {
                const double span = traj.rows.back().t - traj.rows.front().t;
                tol = 1e-8 * std::max(1.0, std::fabs(traj.rows.front().S)) * std::max(1.0, span);
            }
            out.push_back(check_conservation(traj, tol));
        } else if (cs.name == "gronwall") {
            out.push_back(
                check_gronwall(traj, first_nminus_index(traj), cs.tol > 0.0 ? cs.tol : kTolRel));
        } else if (cs.name == "growth_lower_bound") {
            out.push_back(check_growth_lower_bound(traj, first_nminus_index(traj),
                                                   cs.tol > 0.0 ? cs.tol : kTolRel));
        } else if (cs.name == "nminus_invariance") {
            out.push_back(check_nminus_invariance(traj));
        } else if (cs.name == "global_bound") {
            out.push_back(check_global_bound(traj));
        } else if (cs.name == "l2_monotone") {
            out.push_back(check_l2_monotone(traj));
        }
    }
    return out;
}

} // namespace

RunResult execute(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    cfg.validate();
    // output.snapshot_every is an alias for the stepper cadence
    if (cfg.output.snapshot_every > 0 && cfg.stepper.snapshot_every == 0)
        cfg.stepper.snapshot_every = cfg.output.snapshot_every;

    ConeGrid grid = build_grid(cfg.grid.L, cfg.grid.Ns, cfg.grid.Ntheta, cfg.grid.tip_bc);
    DiscreteOperators ops = assemble_operators(grid);

    RunResult res;
    res.config = cfg;
    res.initial.spec = cfg.initial;

    Field u0 = make_initial(grid, ops, cfg.initial);
    res.initial.report = evaluate(grid, ops, u0, cfg.params);

    // well depth on the DirichletTip twin (the tip-vanishing proxy space)
    {
        ConeGrid twin = grid.tip_bc == TipBc::DirichletTip
                            ? grid
                            : build_grid(cfg.grid.L, cfg.grid.Ns, cfg.grid.Ntheta,
                                         TipBc::DirichletTip);
        DiscreteOperators twin_ops =
            grid.tip_bc == TipBc::DirichletTip ? ops : assemble_operators(twin);
        res.initial.d_est =
            estimate_well_depth(twin, twin_ops, cfg.params, 16, 20240601ULL).d_est;
    }

    res.trajectory = run(grid, ops, u0, cfg.params, cfg.stepper);
    res.reports = run_checks(cfg, res.trajectory, grid, ops);
    for (const CheckReport& r : res.reports)
        if (r.status == CheckStatus::Fail) res.gating_ok = false;

    if (!cfg.output.directory.empty()) {
        fs::create_directories(cfg.output.directory);
        const fs::path dir(cfg.output.directory);
        {
            std::ofstream out(dir / "config.json");
            out << config_to_json_text(cfg);
        }
        write_trajectory_csv((dir / "trajectory.csv").string(), res.trajectory);
        std::vector<std::string> snap_files;
        if (!res.trajectory.snapshots.empty()) {
            fs::create_directories(dir / "snapshots");
            for (const Snapshot& s : res.trajectory.snapshots) {
                char name[64];
                std::snprintf(name, sizeof(name), "snapshots/snap_%08ld.txt", s.step);
                write_snapshot((dir / name).string(), grid, s.t, s.field);
                snap_files.emplace_back(name);
            }
        }
        write_check_records((dir / "checks.txt").string(), res.reports);
        write_manifest((dir / "manifest.json").string(), grid, ops, res.trajectory, snap_files);
    }
    return res;
}

// ----------------------------------------------------------------- presets

namespace {

RunConfig base_config() {
    RunConfig c;
    c.grid = {5.0, 64, 64, TipBc::NeumannTip};
    c.params = {};
    c.stepper.dt0 = 1e-3;
    c.stepper.dt_min = 1e-9;
    c.stepper.dt_max = 1e-2;
    c.stepper.t_end = 20.0;
    c.stepper.growth_cap = 1.2;
    c.stepper.blowup_threshold = 1e7;
    c.initial.kind = InitialKind::Dipole;
    c.initial.center_s = -2.5;
    c.initial.center_theta = M_PI / 2.0;
    c.initial.width = 0.6;
    return c;
}

void add_checks(RunConfig& c, std::initializer_list<const char*> names) {
    for (const char* n : names) c.checks.push_back({n, 0.0});
}

} // namespace

std::vector<std::string> preset_names() {
    return {"linear_decay", "subcritical_global", "subcritical_blowup", "higherenergy_blowup",
            "sminus_dichotomy_sweep"};
}

bool preset_is_sweep(const std::string& name) { return name == "sminus_dichotomy_sweep"; }

RunConfig preset_config(const std::string& name) {
    if (name == "linear_decay") {
        // pure linear flow on the tip-vanishing grid: exercises the decay
        // rate mu/(1+mu) of the first eigenmode
        RunConfig c = base_config();
        c.grid.tip_bc = TipBc::DirichletTip;
        c.params.source_on = false;
        c.stepper.dt0 = c.stepper.dt_min = c.stepper.dt_max = 1e-3;
        c.stepper.t_end = 5.0;
        c.initial.kind = InitialKind::Eigenmode;
        c.initial.amplitude = 0.01;
        c.initial.mode_k = 1;
        c.initial.mode_m = 0;
        add_checks(c, {"dissipation", "conservation", "nminus_invariance", "l2_monotone"});
        return c;
    }
    if (name == "subcritical_global") {
        // I(u0) > 0, J(u0) < d_est, S(u0) = 0: global existence regime
        RunConfig c = base_config();
        c.initial.amplitude = 0.05;
        add_checks(c, {"dissipation", "conservation", "gronwall", "nminus_invariance",
                       "global_bound", "l2_monotone"});
        return c;
    }
    if (name == "subcritical_blowup") {
        // I(u0) < 0, S(u0) = 0, J(u0) <= d_est: low-energy blow-up regime
        RunConfig c = base_config();
        c.initial.amplitude = 3.4;
        c.stepper.t_end = 40.0;
        add_checks(c, {"dissipation", "conservation", "gronwall", "growth_lower_bound",
                       "nminus_invariance", "l2_monotone"});
        return c;
    }
    if (name == "higherenergy_blowup") {
        // I(u0) < 0, S(u0) = 0, J(u0) > d_est: the high-energy regime that
        // needs no Lambda_alpha condition
        RunConfig c = base_config();
        c.initial.amplitude = 2.49;
        c.stepper.t_end = 40.0;
        add_checks(c, {"dissipation", "conservation", "gronwall", "growth_lower_bound",
                       "nminus_invariance", "l2_monotone"});
        return c;
    }
    if (name == "sminus_dichotomy_sweep") {
        RunConfig c = base_config();
        c.initial.amplitude = 1.0; // replaced by the sweep axis
        c.stepper.t_end = 15.0;
        add_checks(c, {"dissipation", "conservation", "nminus_invariance", "l2_monotone"});
        return c;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

std::vector<double> preset_sweep_values(const std::string& name) {
    if (name != "sminus_dichotomy_sweep")
        throw std::invalid_argument("preset '" + name + "' is not a sweep");
    std::vector<double> v;
    for (int k = 1; k <= 20; ++k) v.push_back(0.2 * k);
    return v;
}

RunResult run_preset(const std::string& name, const std::string& out_dir, bool quiet) {
    if (preset_is_sweep(name))
        throw std::invalid_argument("run_preset: '" + name + "' is a sweep preset; use sweep()");
    RunConfig cfg = preset_config(name);
    cfg.output.directory = out_dir;
    cfg.output.quiet = quiet;
    return execute(cfg);
}

// ------------------------------------------------------------------- sweep

SweepResult sweep(const RunConfig& config_template, const std::string& axis,
                  const std::vector<double>& values, const std::string& out_dir, int jobs,
                  bool quiet) {
    if (values.empty()) throw std::invalid_argument("sweep: empty values list");
    if (jobs < 1) jobs = 1;

    json tpl = json::parse(config_to_json_text(config_template));
    std::string ptr = "/" + axis;
    for (char& ch : ptr)
        if (ch == '.') ch = '/';
    const json::json_pointer jp(ptr);
    if (!tpl.contains(jp))
        throw std::invalid_argument("sweep: axis '" + axis + "' not found in config");

    auto run_one = [&](std::size_t idx) -> SweepRow {
        json j = tpl;
        j[jp] = values[idx];
        RunConfig cfg = config_from_json_text(j.dump());
        cfg.output.quiet = true;
        if (!out_dir.empty()) {
            char sub[32];
            std::snprintf(sub, sizeof(sub), "run_%03zu", idx);
            cfg.output.directory = (fs::path(out_dir) / sub).string();
        } else {
            cfg.output.directory.clear();
        }
        RunResult rr = execute(cfg);
        SweepRow row;
        row.value = values[idx];
        row.outcome = rr.trajectory.outcome;
        row.t_est = rr.trajectory.t_blowup_est;
        row.J0 = rr.initial.report.J;
        row.I0 = rr.initial.report.I;
        row.S0 = rr.initial.report.S;
        row.sminus = classify_sminus(rr.trajectory);
        row.inconclusive = row.sminus && rr.trajectory.outcome == Outcome::HorizonReached;
        row.checks_ok = rr.gating_ok;
        return row;
    };

    SweepResult res;
    res.rows.resize(values.size());
    std::size_t next = 0;
    while (next < values.size()) {
        const std::size_t batch = std::min<std::size_t>(jobs, values.size() - next);
        std::vector<std::future<SweepRow>> futs;
        for (std::size_t b = 0; b < batch; ++b)
            futs.push_back(std::async(std::launch::async, run_one, next + b));
        for (std::size_t b = 0; b < batch; ++b) res.rows[next + b] = futs[b].get();
        next += batch;
    }

    // the dichotomy is violated exactly when a run blows up without ever
    // visiting N-; (sminus, HorizonReached) pairs stay inconclusive
    for (const SweepRow& row : res.rows) {
        if (row.outcome == Outcome::BlowUp && !row.sminus) res.gating_ok = false;
        if (!row.checks_ok) res.gating_ok = false;
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_sweep_csv((fs::path(out_dir) / "sweep.csv").string(), res);
    }
    (void)quiet;
    return res;
}

// ------------------------------------------------------------ file formats

namespace {
std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "step,t,dt,J,I,S,H2,Linf\n";
    for (const TrajectoryRow& r : traj.rows)
        out << r.step << ',' << fmt_double(r.t) << ',' << fmt_double(r.dt) << ','
            << fmt_double(r.J) << ',' << fmt_double(r.I) << ',' << fmt_double(r.S) << ','
            << fmt_double(r.H2) << ',' << fmt_double(r.Linf) << '\n';
}

std::vector<TrajectoryRow> read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "step,t,dt,J,I,S,H2,Linf")
        throw std::runtime_error("trajectory csv: bad header in " + path);
    std::vector<TrajectoryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TrajectoryRow r;
        double step = 0.0;
        double* cols[] = {&step, &r.t, &r.dt, &r.J, &r.I, &r.S, &r.H2, &r.Linf};
        const char* s = line.c_str();
        for (int c = 0; c < 8; ++c) {
            char* end = nullptr;
            *cols[c] = std::strtod(s, &end);
            if (end == s) throw std::runtime_error("trajectory csv: bad row '" + line + "'");
            s = (*end == ',') ? end + 1 : end;
        }
        r.step = static_cast<long>(step);
        rows.push_back(r);
    }
    return rows;
}

void write_snapshot(const std::string& path, const ConeGrid& grid, double t, const Field& u) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "conewell-snapshot 1\n";
    out << "L " << fmt_double(grid.L) << '\n';
    out << "Ns " << grid.Ns << '\n';
    out << "Ntheta " << grid.Ntheta << '\n';
    out << "tip_bc " << to_string(grid.tip_bc) << '\n';
    out << "t " << fmt_double(t) << '\n';
    for (int k = 0; k < grid.node_count(); ++k) out << fmt_double(u.values(k)) << '\n';
}

SnapshotFile read_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read snapshot " + path);
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != "conewell-snapshot" || version != 1)
        throw std::runtime_error("snapshot: bad header in " + path);
    SnapshotFile s;
    std::string key, bc;
    in >> key >> s.L;
    if (key != "L") throw std::runtime_error("snapshot: expected L");
    in >> key >> s.Ns;
    if (key != "Ns") throw std::runtime_error("snapshot: expected Ns");
    in >> key >> s.Ntheta;
    if (key != "Ntheta") throw std::runtime_error("snapshot: expected Ntheta");
    in >> key >> bc;
    if (key != "tip_bc") throw std::runtime_error("snapshot: expected tip_bc");
    s.tip_bc = tip_bc_from_string(bc);
    in >> key >> s.t;
    if (key != "t") throw std::runtime_error("snapshot: expected t");
    s.values.resize(static_cast<std::size_t>(s.Ns) * s.Ntheta);
    for (double& v : s.values)
        if (!(in >> v)) throw std::runtime_error("snapshot: truncated values in " + path);
    return s;
}

void write_check_records(const std::string& path, const std::vector<CheckReport>& reports) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const CheckReport& r : reports) out << to_record(r);
}

std::uint64_t checksum_doubles(const double* data, std::size_t n) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &data[i], sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

void write_manifest(const std::string& path, const ConeGrid& grid, const DiscreteOperators& ops,
                    const Trajectory& traj, const std::vector<std::string>& snapshot_files) {
    json j;
    j["format_version"] = 1;
    j["grid"] = {{"L", grid.L},           {"Ns", grid.Ns},
                 {"Ntheta", grid.Ntheta}, {"tip_bc", to_string(grid.tip_bc)},
                 {"hs", grid.hs},         {"htheta", grid.htheta},
                 {"measure_B", grid.measure_B}};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64,
                  checksum_doubles(ops.mass.data(), static_cast<std::size_t>(ops.mass.size())));
    j["checksums"]["mass"] = buf;
    std::vector<double> edge_data;
    edge_data.reserve(ops.edges.size() * 2);
    for (const GradientEdge& e : ops.edges) {
        edge_data.push_back(e.inv_len);
        edge_data.push_back(e.weight);
    }
    std::snprintf(buf, sizeof(buf), "%016" PRIx64,
                  checksum_doubles(edge_data.data(), edge_data.size()));
    j["checksums"]["gradient_edges"] = buf;
    std::snprintf(buf, sizeof(buf), "%016" PRIx64,
                  checksum_doubles(ops.stiffness.valuePtr(),
                                   static_cast<std::size_t>(ops.stiffness.nonZeros())));
    j["checksums"]["stiffness"] = buf;
    j["outcome"] = to_string(traj.outcome);
    if (traj.outcome == Outcome::BlowUp) j["t_blowup_est"] = traj.t_blowup_est;
    j["rows"] = traj.rows.size();
    j["files"] = {{"config", "config.json"},
                  {"trajectory", "trajectory.csv"},
                  {"checks", "checks.txt"},
                  {"snapshots", snapshot_files}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

void write_sweep_csv(const std::string& path, const SweepResult& res) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "value,outcome,t_est,J0,I0,S0\n";
    for (const SweepRow& r : res.rows) {
        out << fmt_double(r.value) << ',' << to_string(r.outcome) << ',';
        if (std::isnan(r.t_est))
            out << "";
        else
            out << fmt_double(r.t_est);
        out << ',' << fmt_double(r.J0) << ',' << fmt_double(r.I0) << ',' << fmt_double(r.S0)
            << '\n';
    }
}

std::vector<CheckReport> check_stored_run(const std::string& run_dir,
                                          std::vector<std::string>* log) {
    const fs::path dir(run_dir);
    RunConfig cfg = load_config((dir / "config.json").string());

    Trajectory traj;
    traj.rows = read_trajectory_csv((dir / "trajectory.csv").string());
    if (traj.rows.empty()) throw std::runtime_error("check_stored_run: empty trajectory");
    traj.tip_bc = cfg.grid.tip_bc;
    traj.p = cfg.params.p;

    ConeGrid grid = build_grid(cfg.grid.L, cfg.grid.Ns, cfg.grid.Ntheta, cfg.grid.tip_bc);
    DiscreteOperators ops = assemble_operators(grid);

    // attach stored snapshots when the manifest lists them
    const fs::path manifest = dir / "manifest.json";
    if (fs::exists(manifest)) {
        std::ifstream in(manifest);
        json j = json::parse(in);
        if (j.contains("files") && j["files"].contains("snapshots")) {
            for (const auto& rel : j["files"]["snapshots"]) {
                SnapshotFile sf = read_snapshot((dir / rel.get<std::string>()).string());
                Snapshot s;
                s.t = sf.t;
                s.field = make_field(grid);
                for (int k = 0; k < grid.node_count(); ++k) s.field.values(k) = sf.values[k];
                // recover the step index from the matching row
                s.step = -1;
                for (const TrajectoryRow& row : traj.rows)
                    if (row.t == sf.t) {
                        s.step = row.step;
                        break;
                    }
                if (s.step >= 0) traj.snapshots.push_back(s);
            }
        }
    }

    std::vector<CheckReport> reports = run_checks(cfg, traj, grid, ops);
    if (log)
        for (const CheckReport& r : reports) log->push_back(to_record(r));
    return reports;
}

} // namespace conewell
