#include "conebif/stability.hpp"

#include <cmath>
#include <random>
#include <string>

#include "conebif/error.hpp"
#include "conebif/kernels.hpp"

namespace conebif {

void to_json(nlohmann::json& j, const EigenPair& e) {
  j = {{"lambda", e.lambda}, {"residual", e.residual}, {"iterations", e.iterations}};
}

EigenPair first_eigenpair(const DiscreteOperator& op, const Field& u, double p, double a, const EigenOptions& opts) {
  const Grid& g = op.grid();
  const auto& nodes = g.interior_nodes();
  const int n = op.unknowns();
  const int nt = g.n_theta();

  std::vector<double> pot(g.size());
  kernels::parallel::power_potential(g, u.values, p, a, pot);
  // Rows of A are e^{2s}(-Delta_h); W makes W A symmetric and W D is the potential mass.
  Vector d(n), w(n);
  for (int k = 0; k < n; ++k) {
    const int i = nodes[k] / nt, j = nodes[k] % nt;
    d[k] = pot[nodes[k]];
    w[k] = std::exp((g.dimension() - 2) * g.s(i)) * g.h_s() * g.angular().mass(j);
  }
  if (!(d.maxCoeff() > 0.0)) throw ValidationError("first_eigenpair: potential vanishes identically");

  Vector x(n);
  if (opts.random_start) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    for (int k = 0; k < n; ++k) x[k] = dist(rng);
  } else {
    x.setOnes();
  }

  const SparseMatrix& A = op.matrix();
  EigenPair out;
  double lambda = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    Vector y = op.solve(d.cwiseProduct(x));
    const double bnorm = std::sqrt(y.cwiseProduct(w).cwiseProduct(d).dot(y));
    if (!(bnorm > 0.0) || !std::isfinite(bnorm)) throw NumericalError("first_eigenpair: iteration broke down");
    x = y / bnorm;
    const Vector ax = A * x;
    const Vector bx = d.cwiseProduct(x);
    lambda = x.cwiseProduct(w).dot(ax);  // B-norm of x is one
    const Vector r = ax - lambda * bx;
    const double res = std::sqrt(r.cwiseProduct(w).dot(r)) / (lambda * std::sqrt(bx.cwiseProduct(w).dot(bx)));
    out.iterations = it;
    out.residual = res;
    if (res < opts.tol) break;
    if (it == opts.max_iter)
      throw NumericalError("first_eigenpair: no convergence after " + std::to_string(it) +
                           " iterations (residual " + std::to_string(res) + ")");
  }
  if (x.sum() < 0.0) x = -x;
  if (!(x.minCoeff() > 0.0)) throw NumericalError("first_eigenpair: eigenvector changes sign");

  out.lambda = lambda;
  out.phi = op.extend(x, BoundaryData::zero(g));
  const double e = dirichlet_energy(out.phi);
  for (double& v : out.phi.values) v /= std::sqrt(e);
  return out;
}

StabilityMargin stability_margin(const Problem& pr, double kappa, const SolverOptions& sopts,
                                 const EigenOptions& eopts) {
  StabilityMargin m;
  m.kappa = kappa;
  m.outcome = minimal_solution(pr, kappa, sopts);
  if (!m.outcome.converged())
    throw NumericalError("stability_margin: minimal solution " + to_string(m.outcome.status) + " at kappa " +
                         std::to_string(kappa));
  m.pair = first_eigenpair(pr.op(), m.outcome.last, pr.p(), pr.a(), eopts);
  m.lambda = m.pair.lambda;
  m.margin = m.lambda - 1.0;
  return m;
}

double rayleigh_quotient(const Field& psi, const Field& u, double p, double a) {
  const Grid& g = *psi.grid;
  std::vector<double> pot(g.size());
  kernels::parallel::power_potential(g, u.values, p, a, pot);
  // pot carries e^{2s}; the -2 in the weight removes it.
  std::vector<double> pp(g.size());
  for (int k = 0; k < g.size(); ++k) pp[k] = pot[k] * psi.values[k];
  const double den = kernels::parallel::weighted_dot(g, pp, psi.values, -2.0);
  return dirichlet_energy(psi) / den;
}

}  // namespace conebif
