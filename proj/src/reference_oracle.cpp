#include "conewell/reference_oracle.hpp"

#include "conewell/stepper.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace conewell {

namespace {

double simpson_trapezoid(const AnalyticField& f, double L, int ns, int nt) {
    // composite Simpson over s in [-L, 0], ns even intervals
    const double hs = L / ns;
    const double ht = 2.0 * M_PI / nt;
    double total = 0.0;
    for (int j = 0; j < nt; ++j) {
        const double theta = j * ht;
        double acc = f(-L, theta) + f(0.0, theta);
        for (int i = 1; i < ns; ++i)
            acc += f(-L + i * hs, theta) * ((i % 2 == 1) ? 4.0 : 2.0);
        total += acc * hs / 3.0;
    }
    return total * ht;
}

} // namespace

OracleResult dense_quadrature(const AnalyticField& f, double L, int resolution) {
    if (!(L > 0.0)) throw std::invalid_argument("dense_quadrature: require L > 0");
    if (resolution < 8) throw std::invalid_argument("dense_quadrature: resolution too small");
    int ns = resolution + (resolution % 2);
    int nt = resolution;
    const double fine = simpson_trapezoid(f, L, ns, nt);
    const double coarse = simpson_trapezoid(f, L, ns / 2, std::max(4, nt / 2));
    OracleResult r;
    r.value = fine;
    r.method = "simpson_s x trapezoid_theta";
    r.resolution = ns;
    r.estimated_error = std::fabs(fine - coarse);
    return r;
}

OracleResult eigen_reference(double L, TipBc tip_bc, int k, int m) {
    if (!(L > 0.0)) throw std::invalid_argument("eigen_reference: require L > 0");
    if (m < 0) throw std::invalid_argument("eigen_reference: require m >= 0");
    double mu_s = 0.0;
    if (tip_bc == TipBc::DirichletTip) {
        if (k < 1) throw std::invalid_argument("eigen_reference: DirichletTip needs k >= 1");
        const double kappa = (2.0 * k - 1.0) * M_PI / (2.0 * L);
        mu_s = kappa * kappa;
    } else {
        if (k < 0) throw std::invalid_argument("eigen_reference: NeumannTip needs k >= 0");
        const double kappa = k * M_PI / L;
        mu_s = kappa * kappa;
    }
    OracleResult r;
    r.value = mu_s + static_cast<double>(m) * m;
    r.method = "separated closed form";
    r.resolution = 0;
    r.estimated_error = 0.0;
    return r;
}

double pseudo_parabolic_decay_rate(double mu) {
    if (mu < 0.0) throw std::invalid_argument("pseudo_parabolic_decay_rate: require mu >= 0");
    return mu / (1.0 + mu);
}

std::vector<double> dense_generalized_eigenvalues(const ConeGrid& grid,
                                                  const DiscreteOperators& ops, int count) {
    const int n = grid.node_count();
    if (n > 4096)
        throw std::invalid_argument("dense_generalized_eigenvalues: grid too large for dense solve");
    Eigen::MatrixXd K = Eigen::MatrixXd(ops.stiffness);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) M(i, i) = ops.mass(i);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("dense_generalized_eigenvalues: eigensolve failed");
    std::vector<double> out;
    for (int i = 0; i < std::min(count, n); ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

SLineMode dirichlet_s_mode(double L, int Ns) {
    const double hs = L / Ns;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(Ns, Ns);
    for (int i = 0; i + 1 < Ns; ++i) {
        const double c = 1.0 / hs;
        K(i, i) += c;
        K(i + 1, i + 1) += c;
        K(i, i + 1) -= c;
        K(i + 1, i) -= c;
    }
    K(0, 0) += 2.0 / hs; // half-cell Dirichlet face at s = -L
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(Ns, Ns) * hs;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    SLineMode mode;
    mode.mu = es.eigenvalues()(0);
    mode.values.resize(Ns);
    for (int i = 0; i < Ns; ++i) mode.values[i] = es.eigenvectors()(i, 0);
    return mode;
}

namespace {

// fitted decay rate of ln H2 over a simulated eigenmode run, source off
double fitted_decay_rate(double L, int Ns, double dt, double t_end) {
    ConeGrid grid = build_grid(L, Ns, 8, TipBc::DirichletTip);
    DiscreteOperators ops = assemble_operators(grid);
    SLineMode mode = dirichlet_s_mode(L, Ns);

    Field u0 = make_field(grid);
    for (int i = 0; i < grid.Ns; ++i)
        for (int j = 0; j < grid.Ntheta; ++j)
            u0.values(grid.index(i, j)) = 0.01 * mode.values[i];

    ProblemParams params;
    params.source_on = false;
    StepperConfig cfg;
    cfg.dt0 = cfg.dt_min = cfg.dt_max = dt;
    cfg.t_end = t_end;
    cfg.growth_cap = 10.0;
    Trajectory traj = run(grid, ops, u0, params, cfg);

    double st = 0, sy = 0, stt = 0, sty = 0;
    const double n = static_cast<double>(traj.rows.size());
    for (const TrajectoryRow& row : traj.rows) {
        const double y = std::log(row.H2);
        st += row.t;
        sy += y;
        stt += row.t * row.t;
        sty += row.t * y;
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    return -0.5 * slope;
}

} // namespace

ConvergenceReport analyze_richardson(StudyQuantity q, const std::vector<double>& knobs,
                                     const std::vector<double>& values) {
    if (values.size() < 3)
        throw std::invalid_argument("analyze_richardson: need at least three values");
    ConvergenceReport rep;
    rep.quantity = q;
    rep.knobs = knobs;
    rep.values = values;

    // successive-difference Richardson; knobs are assumed to halve the
    // resolution parameter (hs or dt) from entry to entry
    const std::size_t n = values.size();
    const double d1 = values[n - 3] - values[n - 2];
    const double d2 = values[n - 2] - values[n - 1];
    const double scale = std::fabs(values[n - 1]);
    if (std::fabs(d1) <= 1e-12 * std::max(1.0, scale) &&
        std::fabs(d2) <= 1e-12 * std::max(1.0, scale)) {
        rep.verdict = "exact";
        rep.observed_order = std::numeric_limits<double>::infinity();
    } else if (d1 * d2 <= 0.0) {
        rep.verdict = "inconsistent";
        rep.observed_order = std::numeric_limits<double>::quiet_NaN();
    } else {
        rep.observed_order = std::log2(std::fabs(d1 / d2));
        rep.verdict = "order";
    }
    return rep;
}

ConvergenceReport convergence_study(StudyQuantity q, double L,
                                    const std::vector<double>& knobs) {
    if (knobs.size() < 3)
        throw std::invalid_argument("convergence_study: need at least three resolutions");
    ConvergenceReport rep;
    rep.quantity = q;
    rep.knobs = knobs;
    for (double knob : knobs) {
        switch (q) {
            case StudyQuantity::SmallestEigenvalue: {
                ConeGrid g = build_grid(L, static_cast<int>(knob), 8, TipBc::DirichletTip);
                DiscreteOperators ops = assemble_operators(g);
                rep.values.push_back(dense_generalized_eigenvalues(g, ops, 1).front());
                break;
            }
            case StudyQuantity::DecayRateInHs:
                rep.values.push_back(fitted_decay_rate(L, static_cast<int>(knob), 1e-3, 3.0));
                break;
            case StudyQuantity::DecayRateInDt:
                rep.values.push_back(fitted_decay_rate(L, 64, knob, 3.0));
                break;
            case StudyQuantity::MeasureB: {
                ConeGrid g = build_grid(L, static_cast<int>(knob), 8, TipBc::NeumannTip);
                rep.values.push_back(g.measure_B);
                break;
            }
        }
    }

    return analyze_richardson(q, knobs, rep.values);
}

} // namespace conewell
