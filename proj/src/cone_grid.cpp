#include "conewell/cone_grid.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

namespace conewell {

namespace {
std::atomic<std::uint64_t> next_grid_id{1};
} // namespace

const char* to_string(TipBc bc) {
    return bc == TipBc::NeumannTip ? "neumann" : "dirichlet";
}

TipBc tip_bc_from_string(const std::string& s) {
    if (s == "neumann") return TipBc::NeumannTip;
    if (s == "dirichlet") return TipBc::DirichletTip;
    throw std::invalid_argument("unknown tip_bc '" + s + "' (expected neumann|dirichlet)");
}

void ProblemParams::validate() const {
    if (!(p > 1.0))
        throw std::invalid_argument("ProblemParams: require p > 1");
    if (n < 2)
        throw std::invalid_argument("ProblemParams: require n >= 2");
    if (n >= 3 && !(p + 1.0 < 2.0 * n / (n - 2.0)))
        throw std::invalid_argument("ProblemParams: p + 1 must stay below 2n/(n-2) for n >= 3");
}

ConeGrid build_grid(double L, int Ns, int Ntheta, TipBc tip_bc) {
    if (!(L > 0.0))
        throw std::invalid_argument("build_grid: require L > 0");
    if (Ns < 4 || Ntheta < 4)
        throw std::invalid_argument("build_grid: undersized grid, require Ns >= 4 and Ntheta >= 4");

    ConeGrid g;
    g.L = L;
    g.Ns = Ns;
    g.Ntheta = Ntheta;
    g.tip_bc = tip_bc;
    g.hs = L / Ns;
    g.htheta = 2.0 * M_PI / Ntheta;
    // measure_B is defined as the sum of the quadrature weights; accumulate
    // in node order so integrate(u == 1) reproduces it bit-for-bit.
    const double w = g.hs * g.htheta;
    double total = 0.0;
    for (int k = 0; k < Ns * Ntheta; ++k) total += w;
    g.measure_B = total;
    g.id = next_grid_id.fetch_add(1);
    return g;
}

DiscreteOperators assemble_operators(const ConeGrid& grid) {
    DiscreteOperators ops;
    ops.grid_id = grid.id;
    const int N = grid.node_count();
    const double w = grid.hs * grid.htheta;

    ops.mass = Eigen::VectorXd::Constant(N, w);

    ops.edges.reserve(static_cast<std::size_t>(2 * N));
    // s-direction faces between cells (i, j) and (i+1, j)
    for (int i = 0; i + 1 < grid.Ns; ++i)
        for (int j = 0; j < grid.Ntheta; ++j)
            ops.edges.push_back({grid.index(i, j), grid.index(i + 1, j), 1.0 / grid.hs, w});
    // theta-direction faces, periodic wrap
    for (int i = 0; i < grid.Ns; ++i)
        for (int j = 0; j < grid.Ntheta; ++j)
            ops.edges.push_back({grid.index(i, j), grid.index(i, (j + 1) % grid.Ntheta),
                                 1.0 / grid.htheta, w});
    // tip boundary faces: half-cell gradient against a zero ghost
    if (grid.tip_bc == TipBc::DirichletTip)
        for (int j = 0; j < grid.Ntheta; ++j)
            ops.edges.push_back({grid.index(0, j), -1, 2.0 / grid.hs, 0.5 * grid.hs * grid.htheta});

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * ops.edges.size());
    for (const GradientEdge& e : ops.edges) {
        const double c = e.weight * e.inv_len * e.inv_len;
        trip.emplace_back(e.lo, e.lo, c);
        if (e.hi >= 0) {
            trip.emplace_back(e.hi, e.hi, c);
            trip.emplace_back(e.lo, e.hi, -c);
            trip.emplace_back(e.hi, e.lo, -c);
        }
    }
    ops.stiffness.resize(N, N);
    ops.stiffness.setFromTriplets(trip.begin(), trip.end());
    ops.stiffness.makeCompressed();
    return ops;
}

Field make_field(const ConeGrid& grid) {
    Field f;
    f.values = Eigen::VectorXd::Zero(grid.node_count());
    f.grid_id = grid.id;
    return f;
}

bool field_is_finite(const Field& u) {
    for (Eigen::Index k = 0; k < u.values.size(); ++k)
        if (!std::isfinite(u.values(k))) return false;
    return true;
}

namespace {
void require_match(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u,
                   const char* where) {
    if (ops.grid_id != grid.id || u.grid_id != grid.id ||
        u.values.size() != grid.node_count())
        throw std::invalid_argument(std::string(where) + ": field/operator does not match grid");
}
} // namespace

double integrate(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u) {
    require_match(grid, ops, u, "integrate");
    double s = 0.0;
    for (Eigen::Index k = 0; k < u.values.size(); ++k) s += ops.mass(k) * u.values(k);
    return s;
}

double k_form(const ConeGrid& grid, const DiscreteOperators& ops, const Field& v, const Field& u) {
    require_match(grid, ops, u, "k_form");
    require_match(grid, ops, v, "k_form");
    double acc = 0.0;
    for (const GradientEdge& e : ops.edges) {
        const double gu = ((e.hi >= 0 ? u.values(e.hi) : 0.0) - u.values(e.lo)) * e.inv_len;
        const double gv = ((e.hi >= 0 ? v.values(e.hi) : 0.0) - v.values(e.lo)) * e.inv_len;
        acc += gv * e.weight * gu;
    }
    return acc;
}

double grad_energy(const ConeGrid& grid, const DiscreteOperators& ops, const Field& u) {
    return k_form(grid, ops, u, u);
}

Eigen::VectorXd apply_stiffness(const DiscreteOperators& ops, const Eigen::VectorXd& u) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(u.size());
    for (const GradientEdge& e : ops.edges) {
        const double flux =
            e.weight * e.inv_len * e.inv_len * ((e.hi >= 0 ? u(e.hi) : 0.0) - u(e.lo));
        y(e.lo) -= flux;
        if (e.hi >= 0) y(e.hi) += flux;
    }
    return y;
}

double mass_dot(const DiscreteOperators& ops, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) s += ops.mass(k) * a(k) * b(k);
    return s;
}

double mass_sum(const DiscreteOperators& ops, const Eigen::VectorXd& a) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) s += ops.mass(k) * a(k);
    return s;
}

} // namespace conewell
