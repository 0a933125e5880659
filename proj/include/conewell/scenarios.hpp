#pragma once

#include "conewell/diagnostics.hpp"
#include "conewell/functionals.hpp"
#include "conewell/stepper.hpp"

#include <string>
#include <vector>

// Run configuration, the initial-data library, the named presets that
// reproduce each theorem's hypothesis regime, and all file output:
// trajectory CSV, text snapshots, check records, and the run manifest.

namespace conewell {

enum class InitialKind { Eigenmode, GaussianBump, Dipole, FromSnapshot };

const char* to_string(InitialKind k);
InitialKind initial_kind_from_string(const std::string& s);

struct InitialSpec {
    InitialKind kind = InitialKind::GaussianBump;
    double amplitude = 1.0;     ///< applied last; must be nonzero
    double center_s = -2.5;
    double center_theta = M_PI;
    double width = 0.6;
    int mode_k = 1;             ///< eigenmode profile index
    int mode_m = 0;             ///< angular harmonic
    std::uint64_t seed = 0;
    std::string snapshot_path;  ///< FromSnapshot only
};

struct GridSpec {
    double L = 5.0;
    int Ns = 64;
    int Ntheta = 64;
    TipBc tip_bc = TipBc::NeumannTip;
};

struct CheckSpec {
    std::string name; ///< dissipation|conservation|gronwall|growth_lower_bound|
                      ///< nminus_invariance|global_bound|l2_monotone
    double tol = 0.0; ///< 0 = module default
};

struct OutputSpec {
    std::string directory;
    int snapshot_every = 0;
    bool quiet = false;
};

struct RunConfig {
    GridSpec grid;
    ProblemParams params;
    StepperConfig stepper;
    InitialSpec initial;
    std::vector<CheckSpec> checks;
    OutputSpec output;

    /// Validates every block against the module preconditions (no grid or
    /// operator allocation happens before this passes).
    void validate() const;
};

RunConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const RunConfig& cfg);
RunConfig load_config(const std::string& path);

/// Initial field built from the spec. Dipole data is the difference of a
/// bump and its theta-reflected copy, so the integral of u0 vanishes to
/// machine precision. Rejects zero amplitude.
Field make_initial(const ConeGrid& grid, const DiscreteOperators& ops, const InitialSpec& spec);

/// InitialSpec together with the derived functional report and the well
/// depth it is compared against.
struct InitialData {
    InitialSpec spec;
    FunctionalReport report;
    double d_est = std::numeric_limits<double>::quiet_NaN();
};

struct RunResult {
    RunConfig config;
    InitialData initial;
    Trajectory trajectory;
    std::vector<CheckReport> reports;
    bool gating_ok = true; ///< no report with status Fail
};

/// Executes one configured run end to end: build, simulate, run the
/// configured checks, and (when output.directory is set) write the config
/// copy, trajectory CSV, snapshots, check records, and manifest.
RunResult execute(const RunConfig& cfg);

/// Named theorem-regime presets:
///   linear_decay, subcritical_global, subcritical_blowup,
///   higherenergy_blowup, sminus_dichotomy_sweep
/// Unknown names throw. sminus_dichotomy_sweep is a sweep preset; its
/// amplitude list is available via preset_sweep_values().
RunConfig preset_config(const std::string& name);
bool preset_is_sweep(const std::string& name);
std::vector<double> preset_sweep_values(const std::string& name);
std::vector<std::string> preset_names();

RunResult run_preset(const std::string& name, const std::string& out_dir, bool quiet);

struct SweepRow {
    double value = 0.0;
    Outcome outcome = Outcome::HorizonReached;
    double t_est = std::numeric_limits<double>::quiet_NaN();
    double J0 = 0.0, I0 = 0.0, S0 = 0.0;
    bool sminus = false;
    bool inconclusive = false; ///< visited N- but only reached the horizon
    bool checks_ok = true;     ///< the run's own gating checks
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool gating_ok = true;
};

/// Independent runs of the template with the axis value substituted
/// (axis is a dotted path into the config, e.g. "initial.amplitude").
/// jobs > 1 runs values concurrently; results are identical either way.
SweepResult sweep(const RunConfig& config_template, const std::string& axis,
                  const std::vector<double>& values, const std::string& out_dir, int jobs,
                  bool quiet);

// ---- file formats ----

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
/// Reads rows; outcome/t_est/tip_bc/p are restored by the caller (check verb
/// reads them from the run config + manifest).
std::vector<TrajectoryRow> read_trajectory_csv(const std::string& path);

void write_snapshot(const std::string& path, const ConeGrid& grid, double t, const Field& u);
struct SnapshotFile {
    double L;
    int Ns, Ntheta;
    TipBc tip_bc;
    double t;
    std::vector<double> values;
};
SnapshotFile read_snapshot(const std::string& path);

void write_check_records(const std::string& path, const std::vector<CheckReport>& reports);
void write_manifest(const std::string& path, const ConeGrid& grid, const DiscreteOperators& ops,
                    const Trajectory& traj, const std::vector<std::string>& snapshot_files);
void write_sweep_csv(const std::string& path, const SweepResult& res);

/// FNV-1a over the little-endian bytes of a double sequence.
std::uint64_t checksum_doubles(const double* data, std::size_t n);

/// Re-runs the configured diagnostics on a stored run directory
/// (config.json + trajectory.csv); returns the reports.
std::vector<CheckReport> check_stored_run(const std::string& run_dir,
                                          std::vector<std::string>* log = nullptr);

} // namespace conewell
