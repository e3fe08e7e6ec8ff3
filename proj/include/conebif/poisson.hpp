#pragma once

#include <memory>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "conebif/grid.hpp"

namespace conebif {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// What happens at the artificial ends s = s_min and s = s_max.
struct RadialEndRule {
  enum class Kind { dirichlet, scaled_extrapolation };
  Kind kind = Kind::dirichlet;
  double alpha = 0.0;
  double beta = 0.0;

  /// Values taken from BoundaryData (zero unless prescribed).
  static RadialEndRule dirichlet() { return {}; }
  /// u_end = U(r_end)/U(r_next) * u_next, the behaviour of U_{alpha,beta}.
  static RadialEndRule scaled_extrapolation(double alpha, double beta) {
    return {Kind::scaled_extrapolation, alpha, beta};
  }
};

/// e^{2s}(-Delta_h) restricted to the interior nodes, with boundary couplings
/// moved to the right-hand side. Unknown k is grid node interior_nodes()[k],
/// so the matrix is banded with bandwidth n_theta. Factorized once at
/// construction; solve() is const and may be called concurrently.
class DiscreteOperator {
 public:
  explicit DiscreteOperator(GridPtr grid, RadialEndRule rule = RadialEndRule::dirichlet());

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const RadialEndRule& end_rule() const { return rule_; }
  int unknowns() const { return static_cast<int>(grid_->interior_nodes().size()); }
  const SparseMatrix& matrix() const { return matrix_; }

  /// Right-hand side contribution of the boundary values in `bc`.
  Vector boundary_load(const BoundaryData& bc) const;
  /// x = A^{-1} rhs using the stored factorization.
  Vector solve(const Vector& rhs) const;

  Vector restrict_interior(const Field& f) const;
  /// Field with interior values x, boundary values from bc and the end rule.
  Field extend(const Vector& x, const BoundaryData& bc) const;

  /// Assembles the full system for rhs e^{2s} f and solves it.
  Field solve_field(const Field& f, const BoundaryData& bc) const;

 private:
  GridPtr grid_;
  RadialEndRule rule_;
  SparseMatrix matrix_;
  std::vector<int> unknown_of_node_;
  double rho_min_ = 0.0;  // end/neighbour ratios for scaled_extrapolation
  double rho_max_ = 0.0;
  std::shared_ptr<Eigen::SparseLU<SparseMatrix, Eigen::NaturalOrdering<int>>> lu_;
};

DiscreteOperator build_laplacian(GridPtr grid, RadialEndRule rule = RadialEndRule::dirichlet());

/// Solves -Delta v = f with v = bc on the lateral boundary and the end rule
/// at the radial ends. Throws NumericalError when the relative residual of
/// the linear system exceeds 1e-10.
Field solve_poisson(const DiscreteOperator& op, const Field& f, const BoundaryData& bc);

/// G f: solve_poisson with zero boundary data.
Field green(const DiscreteOperator& op, const Field& f);

/// Quadrature of |grad u|^2 (sphere factor dropped).
double dirichlet_energy(const Field& u);
/// Quadrature of |x|^sigma u^2.
double weighted_l2(const Field& u, double sigma);

/// (((N-2)/2)^2 + Lambda) * int |x|^{-2} phi^2 / int |grad phi|^2 with Lambda
/// from cone_lambda. phi must vanish on the lateral boundary and the ends.
double hardy_check(const Field& phi);
/// Same, with Lambda supplied by the caller.
double hardy_check(const Field& phi, double lambda);

}  // namespace conebif
