#include "conebif/poisson.hpp"

#include <cmath>
#include <string>

#include "conebif/error.hpp"
#include "conebif/kernels.hpp"

namespace conebif {

DiscreteOperator::DiscreteOperator(GridPtr grid, RadialEndRule rule) : grid_(std::move(grid)), rule_(rule) {
  const Grid& g = *grid_;
  const AngularStencil& ang = g.angular();
  const int nt = g.n_theta();
  const auto& nodes = g.interior_nodes();
  unknown_of_node_.assign(g.size(), -1);
  for (int k = 0; k < static_cast<int>(nodes.size()); ++k) unknown_of_node_[nodes[k]] = k;

  if (rule_.kind == RadialEndRule::Kind::scaled_extrapolation) {
    const int n = g.n_s();
    rho_min_ = std::exp(kernels::log_u_ab(rule_.alpha, rule_.beta, g.s(0)) -
                        kernels::log_u_ab(rule_.alpha, rule_.beta, g.s(1)));
    rho_max_ = std::exp(kernels::log_u_ab(rule_.alpha, rule_.beta, g.s(n - 1)) -
                        kernels::log_u_ab(rule_.alpha, rule_.beta, g.s(n - 2)));
  }

  const double aE = kernels::east_coefficient(g), aW = kernels::west_coefficient(g);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nodes.size() * 5);
  for (int k = 0; k < static_cast<int>(nodes.size()); ++k) {
    const int node = nodes[k];
    const int i = node / nt, j = node % nt;
    double diag = aE + aW + ang.north(j) + (j > 0 ? ang.south(j) : 0.0);
    auto couple = [&](int other, double c) {
      const int u = unknown_of_node_[other];
      if (u >= 0) trip.emplace_back(k, u, -c);
    };
    couple(node + nt, aE);
    couple(node - nt, aW);
    couple(node + 1, ang.north(j));
    if (j > 0) couple(node - 1, ang.south(j));
    if (rule_.kind == RadialEndRule::Kind::scaled_extrapolation) {
      if (i == 1) diag -= aW * rho_min_;
      if (i == g.n_s() - 2) diag -= aE * rho_max_;
    }
    trip.emplace_back(k, k, diag);
  }
  matrix_.resize(unknowns(), unknowns());
  matrix_.setFromTriplets(trip.begin(), trip.end());
  matrix_.makeCompressed();

  lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix, Eigen::NaturalOrdering<int>>>();
  lu_->compute(matrix_);
  if (lu_->info() != Eigen::Success) throw NumericalError("Poisson operator factorization failed");
}

Vector DiscreteOperator::boundary_load(const BoundaryData& bc) const {
  const Grid& g = *grid_;
  const AngularStencil& ang = g.angular();
  const int nt = g.n_theta();
  const auto& nodes = g.interior_nodes();
  const bool dirichlet_ends = rule_.kind == RadialEndRule::Kind::dirichlet;
  const double aE = kernels::east_coefficient(g), aW = kernels::west_coefficient(g);
  Vector b = Vector::Zero(unknowns());
  for (int k = 0; k < unknowns(); ++k) {
    const int i = nodes[k] / nt, j = nodes[k] % nt;
    double v = 0.0;
    if (j == ang.last_unknown()) v += ang.north(j) * bc.value(g, i, j + 1);
    if (j == 1 && !ang.has_axis()) v += ang.south(j) * bc.value(g, i, 0);
    if (dirichlet_ends && i == 1) v += aW * bc.value(g, 0, j);
    if (dirichlet_ends && i == g.n_s() - 2) v += aE * bc.value(g, g.n_s() - 1, j);
    b[k] = v;
  }
  return b;
}

Vector DiscreteOperator::solve(const Vector& rhs) const {
  Vector x = lu_->solve(rhs);
  if (lu_->info() != Eigen::Success) throw NumericalError("Poisson solve failed");
  return x;
}

Vector DiscreteOperator::restrict_interior(const Field& f) const {
  const auto& nodes = grid_->interior_nodes();
  Vector x(unknowns());
  for (int k = 0; k < unknowns(); ++k) x[k] = f.values[nodes[k]];
  return x;
}

Field DiscreteOperator::extend(const Vector& x, const BoundaryData& bc) const {
  const Grid& g = *grid_;
  Field f(grid_);
  const int ns = g.n_s(), nt = g.n_theta();
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      const int node = g.index(i, j);
      const int u = unknown_of_node_[node];
      if (u >= 0) {
        f.values[node] = x[u];
      } else if (i > 0 && i < ns - 1) {
        f.values[node] = bc.value(g, i, j);
      }
    }
  for (int j = 0; j < nt; ++j) {
    if (rule_.kind == RadialEndRule::Kind::dirichlet) {
      f(0, j) = bc.value(g, 0, j);
      f(ns - 1, j) = bc.value(g, ns - 1, j);
    } else {
      f(0, j) = rho_min_ * f(1, j);
      f(ns - 1, j) = rho_max_ * f(ns - 2, j);
    }
  }
  return f;
}

Field DiscreteOperator::solve_field(const Field& f, const BoundaryData& bc) const {
  const Grid& g = *grid_;
  const auto& nodes = g.interior_nodes();
  const int nt = g.n_theta();
  Vector rhs = boundary_load(bc);
  for (int k = 0; k < unknowns(); ++k) rhs[k] += std::exp(2.0 * g.s(nodes[k] / nt)) * f.values[nodes[k]];
  const double scale = rhs.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return extend(Vector::Zero(unknowns()), bc);
  if (!std::isfinite(scale)) throw NumericalError("Poisson right-hand side is not finite");
  Vector x = solve(rhs);
  const double res = (matrix_ * x - rhs).lpNorm<Eigen::Infinity>() / scale;
  if (!(res < 1e-10)) throw NumericalError("Poisson residual check failed: " + std::to_string(res));
  return extend(x, bc);
}

DiscreteOperator build_laplacian(GridPtr grid, RadialEndRule rule) { return DiscreteOperator(std::move(grid), rule); }

Field solve_poisson(const DiscreteOperator& op, const Field& f, const BoundaryData& bc) {
  if (f.grid.get() != &op.grid()) throw ValidationError("solve_poisson: field lives on a different grid");
  return op.solve_field(f, bc);
}

Field green(const DiscreteOperator& op, const Field& f) {
  return solve_poisson(op, f, BoundaryData::zero(op.grid()));
}

double dirichlet_energy(const Field& u) { return kernels::parallel::dirichlet_energy(*u.grid, u.values); }

double weighted_l2(const Field& u, double sigma) {
  return kernels::parallel::weighted_dot(*u.grid, u.values, u.values, sigma);
}

double hardy_check(const Field& phi, double lambda) {
  const int N = phi.grid->dimension();
  const double energy = dirichlet_energy(phi);
  if (!(energy > 0.0)) throw NumericalError("hardy_check: zero Dirichlet energy");
  const double c = 0.25 * (N - 2) * (N - 2) + lambda;
  return c * weighted_l2(phi, -2.0) / energy;
}

double hardy_check(const Field& phi) { return hardy_check(phi, cone_lambda(phi.grid->cone())); }

}  // namespace conebif
