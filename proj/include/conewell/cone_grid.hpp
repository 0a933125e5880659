#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

// Discretization of the stretched cone B = [0,1) x S^1 in log coordinates.
//
// The substitution s = ln x1 maps the cone operator (x1 d/dx1)^2 + d^2/dtheta^2
// to the flat Laplacian d^2/ds^2 + d^2/dtheta^2 and the cone measure
// dx1/x1 dtheta to ds dtheta, so the degenerate problem becomes a uniform
// 5-point problem on the rectangle [-L,0] x [0,2pi) with theta periodic.
// The tip x1 = 0 corresponds to s = -inf and is truncated at s = -L.
//
// Cells are centered: s_i = -L + (i+1/2) hs, theta_j = j htheta. Both
// boundaries s = -L and s = 0 are cell faces, not nodes, so every node is
// active under either tip condition; DirichletTip enters as extra
// boundary-face gradient terms against a zero ghost value.

namespace conewell {

enum class TipBc { NeumannTip, DirichletTip };

const char* to_string(TipBc bc);
TipBc tip_bc_from_string(const std::string& s);

/// Equation parameters. Only n = 2 (X = S^1) is realized by the grid
/// builder; n is validated against the subcritical exponent range anyway.
struct ProblemParams {
    double p = 3.0;          ///< source exponent, |u|^{p-1}u
    int n = 2;               ///< spatial dimension of the cone
    bool nonlocal_on = true; ///< subtract the mean of |u|^{p-1}u
    bool source_on = true;   ///< disable for pure linear runs

    /// Throws std::invalid_argument outside p > 1, n >= 2,
    /// and for n >= 3 the range p + 1 < 2n/(n-2).
    void validate() const;
};

struct ConeGrid {
    double L = 0.0;      ///< truncation depth in s = ln x1
    int Ns = 0;          ///< cells in s
    int Ntheta = 0;      ///< cells on the circle
    TipBc tip_bc = TipBc::NeumannTip;
    double hs = 0.0;
    double htheta = 0.0;
    double measure_B = 0.0; ///< sum of quadrature weights = 2*pi*L
    std::uint64_t id = 0;   ///< ties fields/operators to this grid

    int node_count() const { return Ns * Ntheta; }
    int index(int i, int j) const { return i * Ntheta + j; }
    double s(int i) const { return -L + (i + 0.5) * hs; }
    double theta(int j) const { return j * htheta; }
};

/// One nodal scalar state. values(k) is the cell average at node k.
struct Field {
    Eigen::VectorXd values;
    std::uint64_t grid_id = 0;
};

/// One row of the discrete gradient G together with its quadrature weight.
/// Row value is (u[hi] - u[lo]) * inv_len; hi = -1 reads a zero ghost
/// (DirichletTip boundary faces).
struct GradientEdge {
    int lo;
    int hi;
    double inv_len;
    double weight;
};

/// M diagonal, gradient edge list (G and W), and the assembled K = G^T W G.
/// All reductions over edges/nodes follow the stored order, which is fixed
/// at assembly: s-edges, then theta-edges, then tip boundary edges.
struct DiscreteOperators {
    Eigen::VectorXd mass;
    std::vector<GradientEdge> edges;
    Eigen::SparseMatrix<double> stiffness;
    std::uint64_t grid_id = 0;
};

/// Builds the grid. Requires L > 0, Ns >= 4, Ntheta >= 4.
ConeGrid build_grid(double L, int Ns, int Ntheta, TipBc tip_bc);

DiscreteOperators assemble_operators(const ConeGrid& grid);

Field make_field(const ConeGrid& grid);
bool field_is_finite(const Field& u);

/// integral of u against the cone measure, 1^T M u (fixed node order).
double integrate(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u);

/// Canonical bilinear form v^T K u, evaluated as (Gv)^T W (Gu) in the stored
/// edge order. This *is* the definition of the stiffness form; the assembled
/// sparse matrix is derived from it and only backs the linear solver.
double k_form(const ConeGrid& grid, const DiscreteOperators& ops, const Field& v, const Field& u);

/// Gradient energy u^T K u = k_form(u, u) >= 0.
double grad_energy(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u);

/// K * u through the factored path G^T (W (G u)).
Eigen::VectorXd apply_stiffness(const DiscreteOperators& ops, const Eigen::VectorXd& u);

// fixed-order diagonal-weighted reductions shared by the functionals
double mass_dot(const DiscreteOperators& ops, const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double mass_sum(const DiscreteOperators& ops, const Eigen::VectorXd& a);

} // namespace conewell
