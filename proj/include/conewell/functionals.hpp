#pragma once

#include "conewell/cone_grid.hpp"

// Variational quantities attached to a field u on the discrete cone:
//
//   a  = grad energy      = integral |grad_B u|^2 dmu
//   b  = Lp1              = integral |u|^{p+1} dmu
//   J  =  a/2 - b/(p+1)         (energy functional)
//   I  =  a - b                 (Nehari functional)
//   S  = integral u dmu         (conserved under NeumannTip)
//   H2 = ||u||^2_{2,mu} + a     (squared cone Sobolev norm)
//
// The sign of I places u in N+ / N / N-, with an explicit tolerance band
// around zero since exact I = 0 is measure-zero in floating point.

namespace conewell {

enum class NehariClass { NPlus, NZero, NMinus, Degenerate };

const char* to_string(NehariClass c);

/// Relative tolerance for the I = 0 band, scaled by max(1, H2).
inline constexpr double kNehariTol = 1e-9;

struct FunctionalReport {
    double J = 0.0;
    double I = 0.0;
    double S = 0.0;
    double H2 = 0.0;
    double Lp1 = 0.0;
    double grad = 0.0;   ///< a = u^T K u (so J, I are recomputable)
    double Linf = 0.0;
    NehariClass nehari_class = NehariClass::Degenerate;
};

/// All functionals of one field. Throws on non-finite input.
/// nehari_class is NZero when |I| <= kNehariTol * max(1, H2); a field whose
/// gradient energy also sits inside the band cannot lie on the Nehari
/// manifold and is reported Degenerate.
FunctionalReport evaluate(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u,
                          const ProblemParams& params);

/// Maximizer of lambda -> J(lambda u) given a = grad energy, b = Lp1:
/// lambda* = (a/b)^{1/(p-1)}, the scaling that lands u on the Nehari
/// manifold. Throws std::domain_error when b = 0 (no finite maximizer)
/// or a = 0 (degenerate fibering ray).
double fibering_lambda_star(double a, double b, double p);

/// J(lambda* u) = (p-1)/(2(p+1)) * a^{(p+1)/(p-1)} / b^{2/(p-1)} > 0.
double mountain_pass_level(double a, double b, double p);

struct WellGeometry {
    double d_est = 0.0;            ///< trial-family upper bound for the well depth
    double alpha = 0.0;
    double nalpha_radius = 0.0;    ///< sqrt(2 alpha (p+1)/(p-1))
    double lambda_alpha_est = 0.0; ///< sampled lower bound for Lambda_alpha
};

/// Upper bound for the discrete well depth d = inf_N J from a deterministic
/// trial family: separated eigenmode profiles first, then seeded random
/// bumps, each locally refined by seeded perturbations that are only kept
/// when they lower the mountain-pass level. Increasing trial_budget extends
/// the family, so the estimate never increases with the budget.
/// Requires a DirichletTip grid: with NeumannTip, near-constant trials push
/// the level to zero and the estimate is meaningless.
WellGeometry estimate_well_depth(const ConeGrid& grid, const DiscreteOperators& ops,
                                 const ProblemParams& params, int trial_budget,
                                 std::uint64_t seed);

/// Gradient-norm radius of N^alpha. Throws on alpha <= 0.
double nalpha_radius(double alpha, double p);

/// Sampled lower bound for Lambda_alpha = sup { H2 : u in N, J(u) <= alpha }:
/// random fields are projected onto the Nehari manifold via lambda* and the
/// max H2 over admissible projections (grad energy within the N^alpha radius)
/// is returned. 0 when no sample qualifies.
double lambda_alpha_estimate(const ConeGrid& grid, const DiscreteOperators& ops,
                             const ProblemParams& params, double alpha, int samples,
                             std::uint64_t seed);

} // namespace conewell
