#pragma once

#include "conewell/cone_grid.hpp"
#include "conewell/functionals.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

// Time integration of the discrete pseudo-parabolic system
//
//     M u_t + K u_t + K u = M f(u),   f(u) = |u|^{p-1}u - mean correction,
//
// with the linear part implicit and the source explicit:
//
//     (M + K + dt K) u+ = (M + K) u + dt M f(u).
//
// One SPD solve per step; the factorization is reused until dt changes.
// Step control is by the per-step sup-norm growth ratio: reject and halve
// above growth_cap, double after ten accepted steps. Blow-up is declared
// when H2 crosses blowup_threshold or dt collapses below dt_min.

namespace conewell {

struct StepperConfig {
    double dt0 = 1e-3;
    double dt_min = 1e-9;
    double dt_max = 1e-3;
    double t_end = 1.0;
    double growth_cap = 1.2;          ///< max per-step Linf growth ratio
    double blowup_threshold = 1e7;    ///< H2 level declaring blow-up
    double linear_tol = 1e-10;        ///< relative residual accepted from the solve
    int snapshot_every = 0;           ///< 0 = none; k = every k-th accepted step

    void validate() const;
};

enum class Outcome { GlobalDecay, GlobalBounded, BlowUp, HorizonReached, SolverFailure };

const char* to_string(Outcome o);

struct TrajectoryRow {
    long step = 0;
    double t = 0.0;
    double dt = 0.0;
    double J = 0.0;
    double I = 0.0;
    double S = 0.0;
    double H2 = 0.0;
    double Linf = 0.0;
};

struct Snapshot {
    long step = 0;
    double t = 0.0;
    Field field;
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    std::vector<Snapshot> snapshots;
    Outcome outcome = Outcome::HorizonReached;
    double t_blowup_est = std::numeric_limits<double>::quiet_NaN();
    // run context the checks need
    TipBc tip_bc = TipBc::NeumannTip;
    double p = 3.0;
};

/// Raised by the power map when |u| exceeds the overflow guard; run()
/// converts it into Outcome::SolverFailure.
struct SourceOverflow : std::runtime_error {
    SourceOverflow() : std::runtime_error("source overflow: |u| > 1e100") {}
};

/// f = |u|^{p-1}u - (1/|B|) integral |u|^{p-1}u dmu (mean term only when
/// nonlocal_on); the discrete mean of f vanishes to machine precision.
/// With source_on = false the zero field is returned.
Field nonlocal_source(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u,
                      const ProblemParams& params);

/// One IMEX step of size dt > 0 (single SPD solve, factored per call; use
/// run() for trajectories, which caches the factorization across steps).
Field step(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u, double dt,
           const ProblemParams& params);

/// Advances u0 until t_end, blow-up declaration, or failure, recording the
/// functional row after every accepted step. Rejects u0 == 0.
Trajectory run(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u0,
               const ProblemParams& params, const StepperConfig& cfg);

/// Blow-up time estimate: linear fit of H2^{-(p-1)/2} over the final decade
/// of recorded rows, extrapolated to zero. Heuristic, reported as an
/// estimate only; always >= the last recorded t. Throws unless the
/// trajectory ended in BlowUp.
double blowup_time_estimate(const Trajectory& traj);

} // namespace conewell
