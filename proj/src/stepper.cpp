#include "conewell/stepper.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>

namespace conewell {

void StepperConfig::validate() const {
    if (!(dt_min > 0.0) || !(dt_min <= dt0) || !(dt0 <= dt_max))
        throw std::invalid_argument("StepperConfig: require 0 < dt_min <= dt0 <= dt_max");
    if (!(t_end > 0.0)) throw std::invalid_argument("StepperConfig: require t_end > 0");
    if (!(growth_cap > 1.0)) throw std::invalid_argument("StepperConfig: require growth_cap > 1");
    if (!(blowup_threshold > 0.0))
        throw std::invalid_argument("StepperConfig: require blowup_threshold > 0");
    if (!(linear_tol > 0.0)) throw std::invalid_argument("StepperConfig: require linear_tol > 0");
    if (snapshot_every < 0) throw std::invalid_argument("StepperConfig: snapshot_every >= 0");
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::GlobalDecay: return "GlobalDecay";
        case Outcome::GlobalBounded: return "GlobalBounded";
        case Outcome::BlowUp: return "BlowUp";
        case Outcome::HorizonReached: return "HorizonReached";
        case Outcome::SolverFailure: return "SolverFailure";
    }
    return "?";
}

Field nonlocal_source(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u,
                      const ProblemParams& params) {
    params.validate();
    Field f = make_field(grid);
    if (!params.source_on) return f;

    const double pm1 = params.p - 1.0;
    for (Eigen::Index k = 0; k < u.values.size(); ++k) {
        const double v = u.values(k);
        if (std::fabs(v) > 1e100) throw SourceOverflow{};
        f.values(k) = std::pow(std::fabs(v), pm1) * v;
    }
    if (params.nonlocal_on) {
        const double mean = mass_sum(ops, f.values) / grid.measure_B;
        f.values.array() -= mean;
    }
    return f;
}

namespace {

class StepSolver {
  public:
    StepSolver(const ConeGrid& grid, const DiscreteOperators& ops)
        : grid_(grid), ops_(ops), dt_(-1.0) {}

    // (M + (1+dt) K) unew = (M + K) u + dt M f
    Eigen::VectorXd advance(const Eigen::VectorXd& u, const Eigen::VectorXd& f, double dt) {
        if (dt != dt_) factorize(dt);
        Eigen::VectorXd rhs = ops_.mass.cwiseProduct(u) + apply_stiffness(ops_, u) +
                              dt * ops_.mass.cwiseProduct(f);
        Eigen::VectorXd unew = chol_.solve(rhs);
        last_rel_residual_ =
            (matrix_ * unew - rhs).norm() / std::max(1.0, rhs.norm());
        return unew;
    }

    double last_rel_residual() const { return last_rel_residual_; }

  private:
    void factorize(double dt) {
        matrix_ = ops_.stiffness * (1.0 + dt);
        for (int k = 0; k < grid_.node_count(); ++k) matrix_.coeffRef(k, k) += ops_.mass(k);
        matrix_.makeCompressed();
        chol_.compute(matrix_);
        if (chol_.info() != Eigen::Success)
            throw std::runtime_error("stepper: factorization of M + (1+dt)K failed");
        dt_ = dt;
    }

    const ConeGrid& grid_;
    const DiscreteOperators& ops_;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol_;
    double dt_;
    double last_rel_residual_ = 0.0;
};

TrajectoryRow make_row(long step, double t, double dt, const FunctionalReport& r) {
    return {step, t, dt, r.J, r.I, r.S, r.H2, r.Linf};
}

// H2^{-(p-1)/2} is asymptotically linear in t for power-law blow-up; fit its
// final decade and extrapolate to zero.
double fit_blowup_time(const std::vector<TrajectoryRow>& rows, double p) {
    const double h_end = rows.back().H2;
    const double t_last = rows.back().t;
    std::size_t first = rows.size();
    while (first > 0 && rows[first - 1].H2 >= 0.1 * h_end) --first;
    if (rows.size() - first < 3) first = rows.size() >= 3 ? rows.size() - 3 : 0;

    double st = 0, sy = 0, stt = 0, sty = 0;
    std::size_t n = 0;
    for (std::size_t k = first; k < rows.size(); ++k) {
        if (!(rows[k].H2 > 0.0)) continue;
        const double y = std::pow(rows[k].H2, -(p - 1.0) / 2.0);
        st += rows[k].t;
        sy += y;
        stt += rows[k].t * rows[k].t;
        sty += rows[k].t * y;
        ++n;
    }
    if (n < 2) return t_last;
    const double denom = n * stt - st * st;
    if (denom == 0.0) return t_last;
    const double slope = (n * sty - st * sy) / denom;
    const double icept = (sy - slope * st) / n;
    if (!(slope < 0.0)) return t_last;
    return std::max(-icept / slope, t_last);
}

} // namespace

Field step(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u, double dt,
           const ProblemParams& params) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: require dt > 0");
    Field f = nonlocal_source(grid, ops, u, params);
    StepSolver solver(grid, ops);
    Field out = make_field(grid);
    out.values = solver.advance(u.values, f.values, dt);
    if (solver.last_rel_residual() > 1e-8)
        throw std::runtime_error("step: linear solve did not converge");
    return out;
}

Trajectory run(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u0,
               const ProblemParams& params, const StepperConfig& cfg) {
    params.validate();
    cfg.validate();
    if (u0.grid_id != grid.id || u0.values.size() != grid.node_count())
        throw std::invalid_argument("run: initial field does not match grid");
    if (!field_is_finite(u0)) throw std::invalid_argument("run: non-finite initial field");
    if (u0.values.lpNorm<Eigen::Infinity>() == 0.0)
        throw std::invalid_argument("run: initial field must be nontrivial");

    Trajectory traj;
    traj.tip_bc = grid.tip_bc;
    traj.p = params.p;

    Field u = u0;
    double t = 0.0;
    double dt = cfg.dt0;
    long step_no = 0;
    int accepted_since_change = 0;

    FunctionalReport r = evaluate(grid, ops, u, params);
    traj.rows.push_back(make_row(0, 0.0, dt, r));
    if (cfg.snapshot_every > 0) traj.snapshots.push_back({0, 0.0, u});

    StepSolver solver(grid, ops);
    const double t_eps = 1e-12 * cfg.t_end;

    while (t < cfg.t_end - t_eps) {
        const double dt_step = std::min(dt, cfg.t_end - t);

        Field f = make_field(grid);
        try {
            f = nonlocal_source(grid, ops, u, params);
        } catch (const SourceOverflow&) {
            traj.outcome = Outcome::SolverFailure;
            return traj;
        }

        Eigen::VectorXd unew = solver.advance(u.values, f.values, dt_step);
        bool finite = unew.allFinite();
        if (!finite || solver.last_rel_residual() > cfg.linear_tol) {
            traj.outcome = Outcome::SolverFailure;
            return traj;
        }

        const double before = u.values.lpNorm<Eigen::Infinity>();
        const double after = unew.lpNorm<Eigen::Infinity>();
        if (after > cfg.growth_cap * std::max(before, 1e-300)) {
            dt *= 0.5;
            accepted_since_change = 0;
            if (dt < cfg.dt_min) {
                traj.outcome = Outcome::BlowUp;
                traj.t_blowup_est = fit_blowup_time(traj.rows, params.p);
                return traj;
            }
            continue;
        }

        u.values.swap(unew);
        t += dt_step;
        ++step_no;
        ++accepted_since_change;

        r = evaluate(grid, ops, u, params);
        traj.rows.push_back(make_row(step_no, t, dt_step, r));
        if (cfg.snapshot_every > 0 && step_no % cfg.snapshot_every == 0)
            traj.snapshots.push_back({step_no, t, u});

        if (r.H2 > cfg.blowup_threshold) {
            traj.outcome = Outcome::BlowUp;
            traj.t_blowup_est = fit_blowup_time(traj.rows, params.p);
            return traj;
        }

        if (accepted_since_change >= 10 && 2.0 * dt <= cfg.dt_max) {
            dt *= 2.0;
            accepted_since_change = 0;
        }
    }

    if (cfg.snapshot_every > 0 &&
        (traj.snapshots.empty() || traj.snapshots.back().step != step_no))
        traj.snapshots.push_back({step_no, t, u});

    // Horizon classification. With I >= 0 at every row the uniform bound
    // (p-1)/(2(p+1)) H2 <= J(0) applies, so the run is affirmatively global;
    // a clear net decay of H2 distinguishes GlobalDecay.
    bool nehari_nonneg = true;
    for (const TrajectoryRow& row : traj.rows)
        if (row.I < -kNehariTol * std::max(1.0, row.H2)) {
            nehari_nonneg = false;
            break;
        }
    if (!nehari_nonneg) {
        traj.outcome = Outcome::HorizonReached;
    } else if (traj.rows.back().H2 <= 0.5 * traj.rows.front().H2) {
        traj.outcome = Outcome::GlobalDecay;
    } else {
        traj.outcome = Outcome::GlobalBounded;
    }
    return traj;
}

double blowup_time_estimate(const Trajectory& traj) {
    if (traj.outcome != Outcome::BlowUp)
        throw std::logic_error("blowup_time_estimate: trajectory did not end in BlowUp");
    if (traj.rows.size() < 2)
        throw std::logic_error("blowup_time_estimate: too few rows");
    return fit_blowup_time(traj.rows, traj.p);
}

} // namespace conewell
