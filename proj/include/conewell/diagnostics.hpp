#pragma once

#include "conewell/stepper.hpp"

#include <optional>
#include <string>
#include <vector>

// Post-hoc verification of the identities and inequalities that hold along
// weak solutions: energy dissipation, conservation of the integral of u,
// the Gronwall bound on the Nehari functional, the exponential growth lower
// bound, invariance of N-, and the uniform bound in the global regime.
//
// Checks read the recorded functional rows only; the dissipation identity
// additionally consumes stored snapshots when they are available. Every
// check is a pure function of the trajectory.

namespace conewell {

enum class CheckStatus { Pass, Fail, Inapplicable, Info };

const char* to_string(CheckStatus s);

struct CheckReport {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    bool passed = true; ///< passed <=> worst_violation <= tolerance_used
    double worst_violation = 0.0;
    double location_t = 0.0;
    double tolerance_used = 0.0;
};

/// One newline-terminated structured record per report.
std::string to_record(const CheckReport& r);

/// defaults for the exponential-bound checks; time-discretization error
/// accumulates in the exponent, hence the loose relative part
inline constexpr double kTolAbs = 1e-8;
inline constexpr double kTolRel = 5e-2;

/// J nonincreasing across recorded rows: J(t_{k+1}) <= J(t_k) + tol.
CheckReport check_dissipation(const Trajectory& traj, double tol);

/// |dJ + dt ||u_t||^2_H| on consecutive snapshot pairs, u_t taken as the
/// finite difference. Reports the fitted constant C = max residual / dt^2
/// (Info record; needs snapshots and the operators).
std::optional<CheckReport> dissipation_identity_report(const Trajectory& traj,
                                                       const ConeGrid& grid,
                                                       const DiscreteOperators& ops,
                                                       const ProblemParams& params);

/// NeumannTip: max_k |S(t_k) - S(t_0)| <= tol. DirichletTip: the integral is
/// not conserved (tip flux); the drift is reported as an Info record.
CheckReport check_conservation(const Trajectory& traj, double tol);

/// I(t) <= I(t_0) e^{(p-1)(t-t_0)} (1 - tol_rel) + tol_abs for t >= t_0.
/// Inapplicable unless S(u_0) <= 0 (within tolerance) and I(t_0) < 0.
CheckReport check_gronwall(const Trajectory& traj, std::size_t t0_index, double tol_rel);

/// H2(t) >= -2 I(t_0) e^{(p-1)(t-t_0)} (t-t_0) + H2(t_0) - tol.
/// Same applicability conditions as check_gronwall.
CheckReport check_growth_lower_bound(const Trajectory& traj, std::size_t t0_index,
                                     double tol_rel);

/// Once I(t_k) < -tol_I, I must stay negative. Requires S(u_0) <= 0.
CheckReport check_nminus_invariance(const Trajectory& traj);

/// (p-1)/(2(p+1)) H2(t) <= J(t_0) + tol whenever I >= 0 at every row;
/// Inapplicable once the trajectory enters I < 0.
CheckReport check_global_bound(const Trajectory& traj);

/// Informational: L2 = H2 - a nonincreasing, with a recovered from (J, I).
/// The derivation of this monotonicity is restricted in scope, so the record
/// never gates.
CheckReport check_l2_monotone(const Trajectory& traj);

/// True iff some recorded row has I < -tol_I (the trajectory visited N-).
/// Throws on an empty trajectory.
bool classify_sminus(const Trajectory& traj);

} // namespace conewell
