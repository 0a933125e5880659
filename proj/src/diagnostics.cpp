#include "conewell/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace conewell {

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Inapplicable: return "inapplicable";
        case CheckStatus::Info: return "info";
    }
    return "?";
}

std::string to_record(const CheckReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "check name=%s status=%s worst_violation=%.17g location_t=%.17g tolerance=%.17g\n",
                  r.name.c_str(), to_string(r.status), r.worst_violation, r.location_t,
                  r.tolerance_used);
    return buf;
}

namespace {

bool nehari_negative(const TrajectoryRow& row) {
    return row.I < -kNehariTol * std::max(1.0, row.H2);
}

bool initial_integral_nonpositive(const Trajectory& traj) {
    // S(u0) <= 0 up to the scale of the quadrature roundoff
    const TrajectoryRow& r0 = traj.rows.front();
    return r0.S <= 1e-9 * std::max(1.0, std::fabs(r0.H2));
}

CheckReport finish(CheckReport r) {
    r.passed = r.status != CheckStatus::Fail;
    return r;
}

void require_rows(const Trajectory& traj, std::size_t n, const char* who) {
    if (traj.rows.size() < n)
        throw std::invalid_argument(std::string(who) + ": trajectory has too few rows");
}

} // namespace

CheckReport check_dissipation(const Trajectory& traj, double tol) {
    require_rows(traj, 2, "check_dissipation");
    CheckReport r;
    r.name = "dissipation";
    r.tolerance_used = tol;
    r.worst_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < traj.rows.size(); ++k) {
        const double jump = traj.rows[k + 1].J - traj.rows[k].J;
        if (jump > r.worst_violation) {
            r.worst_violation = jump;
            r.location_t = traj.rows[k + 1].t;
        }
    }
    r.status = r.worst_violation <= tol ? CheckStatus::Pass : CheckStatus::Fail;
    return finish(r);
}

std::optional<CheckReport> dissipation_identity_report(const Trajectory& traj,
                                                       const ConeGrid& grid,
                                                       const DiscreteOperators& ops,
                                                       const ProblemParams& params) {
    if (traj.snapshots.size() < 2) return std::nullopt;

    double worst = 0.0, worst_t = 0.0, cfit = 0.0;
    bool any = false;
    for (std::size_t k = 0; k + 1 < traj.snapshots.size(); ++k) {
        const Snapshot& a = traj.snapshots[k];
        const Snapshot& b = traj.snapshots[k + 1];
        if (b.step != a.step + 1) continue; // u_t needs consecutive steps
        const double dt = b.t - a.t;
        if (!(dt > 0.0)) continue;
        Field ut = make_field(grid);
        ut.values = (b.field.values - a.field.values) / dt;
        const double ut_h2 = mass_dot(ops, ut.values, ut.values) + grad_energy(grid, ops, ut);
        const double ja = evaluate(grid, ops, a.field, params).J;
        const double jb = evaluate(grid, ops, b.field, params).J;
        const double resid = std::fabs(jb - ja + dt * ut_h2);
        if (resid > worst) {
            worst = resid;
            worst_t = b.t;
        }
        cfit = std::max(cfit, resid / (dt * dt));
        any = true;
    }
    if (!any) return std::nullopt;

    CheckReport r;
    r.name = "dissipation_identity(C_fit=" + std::to_string(cfit) + ")";
    r.status = CheckStatus::Info;
    r.worst_violation = worst;
    r.location_t = worst_t;
    r.tolerance_used = std::numeric_limits<double>::infinity();
    return finish(r);
}

CheckReport check_conservation(const Trajectory& traj, double tol) {
    require_rows(traj, 2, "check_conservation");
    CheckReport r;
    const double s0 = traj.rows.front().S;
    double drift = 0.0, where = traj.rows.front().t;
    for (const TrajectoryRow& row : traj.rows) {
        const double d = std::fabs(row.S - s0);
        if (d > drift) {
            drift = d;
            where = row.t;
        }
    }
    r.worst_violation = drift;
    r.location_t = where;
    if (traj.tip_bc == TipBc::DirichletTip) {
        // not conserved under the tip condition; drift reported, never gates
        r.name = "conservation(dirichlet-drift)";
        r.status = CheckStatus::Info;
        r.tolerance_used = std::numeric_limits<double>::infinity();
    } else {
        r.name = "conservation";
        r.tolerance_used = tol;
        r.status = drift <= tol ? CheckStatus::Pass : CheckStatus::Fail;
    }
    return finish(r);
}

CheckReport check_gronwall(const Trajectory& traj, std::size_t t0_index, double tol_rel) {
    require_rows(traj, 2, "check_gronwall");
    if (t0_index >= traj.rows.size())
        throw std::invalid_argument("check_gronwall: t0_index out of range");
    CheckReport r;
    r.name = "gronwall";
    r.tolerance_used = kTolAbs;
    const TrajectoryRow& r0 = traj.rows[t0_index];
    if (!initial_integral_nonpositive(traj) || !(r0.I < 0.0)) {
        r.status = CheckStatus::Inapplicable;
        r.worst_violation = 0.0;
        return finish(r);
    }
    double worst = -std::numeric_limits<double>::infinity(), where = r0.t;
    for (std::size_t k = t0_index; k < traj.rows.size(); ++k) {
        const TrajectoryRow& row = traj.rows[k];
        const double bound = r0.I * std::exp((traj.p - 1.0) * (row.t - r0.t));
        const double viol = row.I - bound * (1.0 - tol_rel);
        if (viol > worst) {
            worst = viol;
            where = row.t;
        }
    }
    r.worst_violation = worst;
    r.location_t = where;
    r.status = worst <= kTolAbs ? CheckStatus::Pass : CheckStatus::Fail;
    return finish(r);
}

CheckReport check_growth_lower_bound(const Trajectory& traj, std::size_t t0_index,
                                     double tol_rel) {
    require_rows(traj, 2, "check_growth_lower_bound");
    if (t0_index >= traj.rows.size())
        throw std::invalid_argument("check_growth_lower_bound: t0_index out of range");
    CheckReport r;
    r.name = "growth_lower_bound";
    r.tolerance_used = kTolAbs;
    const TrajectoryRow& r0 = traj.rows[t0_index];
    if (!initial_integral_nonpositive(traj) || !(r0.I < 0.0)) {
        r.status = CheckStatus::Inapplicable;
        r.worst_violation = 0.0;
        return finish(r);
    }
    double worst = -std::numeric_limits<double>::infinity(), where = r0.t;
    for (std::size_t k = t0_index; k < traj.rows.size(); ++k) {
        const TrajectoryRow& row = traj.rows[k];
        const double dt0 = row.t - r0.t;
        const double bound = -2.0 * r0.I * std::exp((traj.p - 1.0) * dt0) * dt0 + r0.H2;
        const double viol = (bound - row.H2) - tol_rel * std::fabs(bound);
        if (viol > worst) {
            worst = viol;
            where = row.t;
        }
    }
    r.worst_violation = worst;
    r.location_t = where;
    r.status = worst <= kTolAbs ? CheckStatus::Pass : CheckStatus::Fail;
    return finish(r);
}

CheckReport check_nminus_invariance(const Trajectory& traj) {
    require_rows(traj, 1, "check_nminus_invariance");
    CheckReport r;
    r.name = "nminus_invariance";
    r.tolerance_used = 0.0;
    std::size_t first = traj.rows.size();
    for (std::size_t k = 0; k < traj.rows.size(); ++k)
        if (nehari_negative(traj.rows[k])) {
            first = k;
            break;
        }
    if (first == traj.rows.size()) { // never entered N-: vacuous pass
        r.status = CheckStatus::Pass;
        r.worst_violation = 0.0;
        r.location_t = traj.rows.back().t;
        return finish(r);
    }
    double worst = -std::numeric_limits<double>::infinity(), where = traj.rows[first].t;
    for (std::size_t k = first + 1; k < traj.rows.size(); ++k) {
        if (traj.rows[k].I > worst) {
            worst = traj.rows[k].I;
            where = traj.rows[k].t;
        }
    }
    if (first + 1 == traj.rows.size()) worst = traj.rows[first].I;
    r.worst_violation = worst;
    r.location_t = where;
    r.status = worst < 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
    return finish(r);
}

CheckReport check_global_bound(const Trajectory& traj) {
    require_rows(traj, 1, "check_global_bound");
    CheckReport r;
    r.name = "global_bound";
    r.tolerance_used = kTolAbs;
    for (const TrajectoryRow& row : traj.rows)
        if (nehari_negative(row)) {
            r.status = CheckStatus::Inapplicable;
            r.worst_violation = 0.0;
            r.location_t = row.t;
            return finish(r);
        }
    const double j0 = traj.rows.front().J;
    const double c = (traj.p - 1.0) / (2.0 * (traj.p + 1.0));
    double worst = -std::numeric_limits<double>::infinity(), where = traj.rows.front().t;
    for (const TrajectoryRow& row : traj.rows) {
        const double viol = c * row.H2 - j0;
        if (viol > worst) {
            worst = viol;
            where = row.t;
        }
    }
    r.worst_violation = worst;
    r.location_t = where;
    r.status = worst <= kTolAbs ? CheckStatus::Pass : CheckStatus::Fail;
    return finish(r);
}

CheckReport check_l2_monotone(const Trajectory& traj) {
    require_rows(traj, 2, "check_l2_monotone");
    CheckReport r;
    r.name = "l2_monotone(informational)";
    r.status = CheckStatus::Info;
    r.tolerance_used = std::numeric_limits<double>::infinity();
    const double pm = traj.p;
    auto l2_of = [pm](const TrajectoryRow& row) {
        // a = (2(p+1)J - 2I)/(p-1), L2 = H2 - a
        const double a = (2.0 * (pm + 1.0) * row.J - 2.0 * row.I) / (pm - 1.0);
        return row.H2 - a;
    };
    double worst = -std::numeric_limits<double>::infinity(), where = traj.rows.front().t;
    for (std::size_t k = 0; k + 1 < traj.rows.size(); ++k) {
        const double jump = l2_of(traj.rows[k + 1]) - l2_of(traj.rows[k]);
        if (jump > worst) {
            worst = jump;
            where = traj.rows[k + 1].t;
        }
    }
    r.worst_violation = worst;
    r.location_t = where;
    return finish(r);
}

bool classify_sminus(const Trajectory& traj) {
    if (traj.rows.empty())
        throw std::invalid_argument("classify_sminus: empty trajectory");
    for (const TrajectoryRow& row : traj.rows)
        if (nehari_negative(row)) return true;
    return false;
}

} // namespace conewell
