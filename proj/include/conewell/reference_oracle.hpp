#pragma once

#include "conewell/cone_grid.hpp"

#include <functional>
#include <string>
#include <vector>

// Independent ground-truth routes used by the test suite and the check CLI
// verb. Deliberately different machinery from the main code path:
//
//   * dense_quadrature: composite Simpson in s, exact-periodic trapezoid in
//     theta, at a resolution well above the main grid (the main path uses
//     the midpoint/cell rule).
//   * eigen_reference: separated closed-form eigenvalues of the log-cylinder
//     problem, plus the linear pseudo-parabolic decay rate mu/(1+mu).
//   * dense generalized eigensolve of (K, M) on small grids.
//   * Richardson convergence studies of eigenvalue and decay-rate errors.

namespace conewell {

struct OracleResult {
    double value = 0.0;
    std::string method;
    int resolution = 0;
    double estimated_error = 0.0; ///< >= 0, from Richardson pairing where available
};

using AnalyticField = std::function<double(double s, double theta)>;

/// integral of f over [-L,0] x [0,2pi) at the given resolution (number of
/// Simpson intervals in s and of trapezoid nodes in theta; rounded up to
/// even). estimated_error comes from comparing with the half-resolution rule.
OracleResult dense_quadrature(const AnalyticField& f, double L, int resolution);

/// Continuum eigenvalue of -Laplace on the log cylinder with the tip
/// condition at s = -L and a Neumann outer face:
///     DirichletTip: mu = ((2k-1) pi / (2L))^2 + m^2,  k >= 1
///     NeumannTip:   mu = (k pi / L)^2 + m^2,          k >= 0
OracleResult eigen_reference(double L, TipBc tip_bc, int k, int m);

/// Decay rate of the mode e^{-lambda t} phi for u_t - Lap u_t - Lap u = 0:
/// lambda = mu / (1 + mu).
double pseudo_parabolic_decay_rate(double mu);

/// Smallest `count` generalized eigenvalues of (K, M), dense solve.
/// Intended for small grids only.
std::vector<double> dense_generalized_eigenvalues(const ConeGrid& grid,
                                                  const DiscreteOperators& ops, int count);

/// Smallest eigenpair of the 1D s-line problem (DirichletTip / Neumann
/// outer) on its own tiny dense assembly; used to seed exact discrete
/// eigenmode runs for the decay-rate studies.
struct SLineMode {
    double mu = 0.0;
    std::vector<double> values; ///< one value per s-cell
};
SLineMode dirichlet_s_mode(double L, int Ns);

enum class StudyQuantity {
    SmallestEigenvalue, ///< DirichletTip (K, M) eigenvalue vs Ns
    DecayRateInHs,      ///< fitted linear decay rate vs Ns at fixed dt
    DecayRateInDt,      ///< fitted linear decay rate vs dt at fixed Ns
    MeasureB            ///< exact regardless of resolution
};

struct ConvergenceReport {
    StudyQuantity quantity;
    std::vector<double> knobs;  ///< Ns values or dt values, coarse to fine
    std::vector<double> values; ///< observed quantity per knob
    double observed_order = 0.0;
    std::string verdict; ///< "order", "exact", or "inconsistent"
};

/// Richardson order from successive differences of at least three values
/// (cancels any resolution-independent bias). Differences below roundoff
/// give "exact"; a sign flip between differences gives "inconsistent".
ConvergenceReport analyze_richardson(StudyQuantity q, const std::vector<double>& knobs,
                                     const std::vector<double>& values);

ConvergenceReport convergence_study(StudyQuantity q, double L,
                                    const std::vector<double>& knobs);

} // namespace conewell
