#include "conebif/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conebif/barriers.hpp"
#include "conebif/error.hpp"
#include "conebif/kernels.hpp"

namespace conebif {

namespace {

using LU = Eigen::SparseLU<SparseMatrix, Eigen::NaturalOrdering<int>>;

Vector interior(const Problem& pr, const std::vector<double>& full) {
  const auto& nodes = pr.grid().interior_nodes();
  Vector out(nodes.size());
  for (int k = 0; k < static_cast<int>(nodes.size()); ++k) out[k] = full[nodes[k]];
  return out;
}

// Strong-form residual F = A x - kappa b - e^{2s} K u_+^p and the potential e^{2s} p K u_+^{p-1}.
struct Linearization {
  Vector F;
  Vector pot;
};

Linearization linearize(const Problem& pr, const Vector& x, double kappa) {
  const Field u = pr.field(x, kappa);
  std::vector<double> src(pr.grid().size()), pot(pr.grid().size());
  kernels::parallel::power_source(pr.grid(), u.values, pr.p(), pr.a(), src);
  kernels::parallel::power_potential(pr.grid(), u.values, pr.p(), pr.a(), pot);
  Linearization lin;
  lin.F = pr.op().matrix() * x - kappa * pr.load() - interior(pr, src);
  lin.pot = interior(pr, pot);
  return lin;
}

// ||A^{-1} F||_inf / ||x||_inf, the relative size of Phi.
double relative_phi(const Problem& pr, const Vector& F, const Vector& x) {
  const double scale = x.lpNorm<Eigen::Infinity>();
  const double r = pr.op().solve(F).lpNorm<Eigen::Infinity>();
  return scale > 0.0 ? r / scale : r;
}

SparseMatrix jacobian(const Problem& pr, const Vector& pot) {
  SparseMatrix J = pr.op().matrix();
  for (int k = 0; k < J.rows(); ++k) J.coeffRef(k, k) -= pot[k];
  return J;
}

Vector quad_weights(const Problem& pr) {
  const Grid& g = pr.grid();
  const auto& nodes = g.interior_nodes();
  Vector q(nodes.size());
  for (int k = 0; k < static_cast<int>(nodes.size()); ++k)
    q[k] = g.quad_weight(nodes[k] / g.n_theta(), nodes[k] % g.n_theta());
  return q;
}

BranchPoint make_point(const Problem& pr, const Vector& x, double kappa, double arclength, double residual) {
  BranchPoint bp;
  bp.kappa = kappa;
  bp.u = pr.field(x, kappa);
  bp.arclength = arclength;
  bp.residual = residual;
  bp.sup_u = sup_abs_interior(bp.u);
  bp.cab = cab_norm(bp.u, pr.window().alpha, pr.window().beta);
  bp.decay_sup = decay_report(bp.u, pr.p(), pr.a(), pr.window()).sup_scaled;
  bp.lambda = first_eigenpair(pr.op(), bp.u, pr.p(), pr.a()).lambda;
  return bp;
}

struct Corrected {
  Vector x;
  double kappa = 0.0;
  double residual = 0.0;
  bool ok = false;
};

Corrected correct(const Problem& pr, const Vector& q, const Vector& x_prev, double k_prev, const Vector& tx,
                  double tk, double ds, const NewtonOptions& opts) {
  const int n = static_cast<int>(x_prev.size());
  const Vector wt = q.cwiseProduct(tx);
  Corrected c;
  c.x = x_prev + ds * tx;
  c.kappa = k_prev + ds * tk;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const Linearization lin = linearize(pr, c.x, c.kappa);
    const double g = wt.dot(c.x - x_prev) + (c.kappa - k_prev) * tk - ds;
    c.residual = relative_phi(pr, lin.F, c.x);
    if (!std::isfinite(c.residual)) return c;
    if (c.residual < opts.tol && std::abs(g) < 1e-10 * std::max(1.0, ds)) {
      c.ok = c.x.minCoeff() > 0.0;
      return c;
    }
    if (it == opts.max_iter) break;

    // [J  -b; w^T t_u  t_kappa] on n + 1 unknowns.
    const SparseMatrix J = jacobian(pr, lin.pot);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(J.nonZeros() + 2 * n + 1);
    for (int col = 0; col < J.outerSize(); ++col)
      for (SparseMatrix::InnerIterator itj(J, col); itj; ++itj) trip.emplace_back(itj.row(), itj.col(), itj.value());
    for (int k = 0; k < n; ++k) {
      if (pr.load()[k] != 0.0) trip.emplace_back(k, n, -pr.load()[k]);
      if (wt[k] != 0.0) trip.emplace_back(n, k, wt[k]);
    }
    trip.emplace_back(n, n, tk);
    SparseMatrix Aug(n + 1, n + 1);
    Aug.setFromTriplets(trip.begin(), trip.end());
    Aug.makeCompressed();
    LU lu;
    lu.compute(Aug);
    if (lu.info() != Eigen::Success) return c;
    Vector rhs(n + 1);
    rhs.head(n) = -lin.F;
    rhs[n] = -g;
    const Vector d = lu.solve(rhs);
    if (!d.allFinite()) return c;
    c.x += d.head(n);
    c.kappa += d[n];
  }
  return c;
}

double parabola_vertex(double s0, double k0, double s1, double k1, double s2, double k2) {
  // Newton divided differences for kappa(s) = k0 + d1 (s - s0) + d2 (s - s0)(s - s1).
  const double d01 = (k1 - k0) / (s1 - s0);
  const double d12 = (k2 - k1) / (s2 - s1);
  const double d2 = (d12 - d01) / (s2 - s0);
  if (!(d2 < 0.0)) return std::max({k0, k1, k2});
  // derivative d01 + d2 (2s - s0 - s1) = 0
  const double sv = 0.5 * (s0 + s1) - 0.5 * d01 / d2;
  return k0 + d01 * (sv - s0) + d2 * (sv - s0) * (sv - s1);
}

}  // namespace

Field residual_map(const Problem& pr, const Field& u, double kappa) {
  const Vector x = pr.op().restrict_interior(u);
  const Linearization lin = linearize(pr, x, kappa);
  return pr.op().extend(pr.op().solve(lin.F), BoundaryData::zero(pr.grid()));
}

NewtonResult newton_solve(const Problem& pr, const Field& u0, double kappa, const NewtonOptions& opts) {
  NewtonResult out;
  Vector x = pr.op().restrict_interior(u0);
  for (int it = 0;; ++it) {
    const Linearization lin = linearize(pr, x, kappa);
    const double res = relative_phi(pr, lin.F, x);
    out.residuals.push_back(res);
    out.iterations = it;
    if (!std::isfinite(res)) break;
    if (res < opts.tol) {
      out.converged = true;
      break;
    }
    if (it == opts.max_iter) break;
    LU lu;
    lu.compute(jacobian(pr, lin.pot));
    if (lu.info() != Eigen::Success) throw SingularJacobianError("newton_solve: Jacobian factorization failed");
    const Vector d = lu.solve(-lin.F);
    if (!d.allFinite() || d.lpNorm<Eigen::Infinity>() > 1e8 * std::max(1.0, x.lpNorm<Eigen::Infinity>()))
      throw SingularJacobianError("newton_solve: Jacobian is numerically singular");
    x += d;
  }
  out.u = pr.field(x, kappa);
  return out;
}

void to_json(nlohmann::json& j, const BifurcationDiagram& d) {
  j = {{"points", d.points.size()},
       {"fold_index", d.fold_index ? nlohmann::json(*d.fold_index) : nlohmann::json(nullptr)},
       {"kappa_star_estimate", d.kappa_star_estimate},
       {"kappa_lower_estimate", d.kappa_lower_estimate},
       {"fold_slope", d.fold_slope},
       {"fold_lambda", d.fold_lambda}};
}

BifurcationDiagram trace_branch(const Problem& pr, double kappa_start, const ContinuationOptions& opts) {
  if (!(opts.ds > 0.0)) throw ValidationError("trace_branch: ds must be positive");
  SolverOptions so;
  so.max_iter = 20000;
  const IterationOutcome start = minimal_solution(pr, kappa_start, so);
  if (!start.converged())
    throw NumericalError("trace_branch: minimal solution at the start kappa " + to_string(start.status));
  NewtonResult polished = newton_solve(pr, start.last, kappa_start, opts.newton);
  if (!polished.converged) throw NumericalError("trace_branch: Newton polish of the start point failed");

  const Vector q = quad_weights(pr);
  BifurcationDiagram d;
  Vector x = pr.op().restrict_interior(polished.u);
  double kappa = kappa_start;
  double arclength = 0.0;
  d.points.push_back(make_point(pr, x, kappa, arclength, polished.residuals.back()));

  Vector tx = Vector::Zero(x.size());
  double tk = 1.0;
  double ds = opts.ds;
  double kappa_max = kappa;
  int imax = 0;
  for (int step = 0; step < opts.max_steps; ++step) {
    Corrected c = correct(pr, q, x, kappa, tx, tk, ds, opts.newton);
    while (!c.ok) {
      ds *= 0.5;
      if (ds < opts.ds_min_factor * opts.ds)
        throw NumericalError("trace_branch: corrector failed down to the minimal step at kappa " +
                             std::to_string(kappa));
      c = correct(pr, q, x, kappa, tx, tk, ds, opts.newton);
    }
    // Next secant tangent, normalized in the arclength product.
    const Vector dx = c.x - x;
    const double dk = c.kappa - kappa;
    const double norm = std::sqrt(dx.cwiseProduct(q).dot(dx) + dk * dk);
    tx = dx / norm;
    tk = dk / norm;
    x = c.x;
    kappa = c.kappa;
    arclength += ds;
    d.ds_used.push_back(ds);
    d.points.push_back(make_point(pr, x, kappa, arclength, c.residual));
    ds = std::min(opts.ds, 2.0 * ds);

    const int last = static_cast<int>(d.points.size()) - 1;
    if (kappa > kappa_max) {
      kappa_max = kappa;
      imax = last;
    }
    if (!d.fold_index && kappa < kappa_max && imax > 0) d.fold_index = imax;
    if (d.fold_index) {
      const BranchPoint& f = d.points[*d.fold_index];
      if (kappa < opts.kappa_floor * f.kappa) break;
      if (d.points.back().sup_u > opts.sup_factor * f.sup_u) break;
    }
  }

  if (d.fold_index) {
    const int f = *d.fold_index;
    const auto& P = d.points;
    d.kappa_star_estimate =
        parabola_vertex(P[f - 1].arclength, P[f - 1].kappa, P[f].arclength, P[f].kappa, P[f + 1].arclength, P[f + 1].kappa);
    const double left = std::abs(P[f].kappa - P[f - 1].kappa) / (P[f].arclength - P[f - 1].arclength);
    const double right = std::abs(P[f + 1].kappa - P[f].kappa) / (P[f + 1].arclength - P[f].arclength);
    d.fold_slope = std::min(left, right);
    d.fold_lambda = P[f].lambda;
    d.kappa_lower_estimate = P[f].kappa;
    for (std::size_t k = f; k < P.size(); ++k) d.kappa_lower_estimate = std::min(d.kappa_lower_estimate, P[k].kappa);
  }
  return d;
}

PairAtKappa solution_pair(const Problem& pr, const BifurcationDiagram& d, double kappa, const NewtonOptions& opts) {
  if (!d.fold_index) throw ValidationError("solution_pair: the diagram has no fold");
  const auto& P = d.points;
  int m = -1;
  for (std::size_t k = *d.fold_index; k + 1 < P.size(); ++k)
    if (P[k].kappa >= kappa && P[k + 1].kappa <= kappa) {
      m = static_cast<int>(k);
      break;
    }
  if (m < 0) throw ValidationError("solution_pair: kappa is not covered by the upper branch");

  PairAtKappa out;
  out.kappa = kappa;
  const double t = (P[m].kappa - kappa) / (P[m].kappa - P[m + 1].kappa);
  Field guess = P[m].u;
  for (std::size_t k = 0; k < guess.values.size(); ++k)
    guess.values[k] = (1.0 - t) * P[m].u.values[k] + t * P[m + 1].u.values[k];
  NewtonResult up = newton_solve(pr, guess, kappa, opts);
  if (!up.converged) throw NumericalError("solution_pair: Newton failed on the upper branch");

  SolverOptions so;
  so.max_iter = 20000;
  const IterationOutcome low = minimal_solution(pr, kappa, so);
  if (!low.converged()) throw NumericalError("solution_pair: minimal solution " + to_string(low.status));
  NewtonResult lowp = newton_solve(pr, low.last, kappa, opts);
  if (!lowp.converged) throw NumericalError("solution_pair: Newton polish of the minimal solution failed");

  out.upper = up.u;
  out.lower = lowp.u;
  out.upper_residual = up.residuals.back();
  out.lower_residual = lowp.residuals.back();
  return out;
}

double separating_functional(const Problem& pr, const Field& u_fold, const Field& phi_fold, const Field& h) {
  const Grid& g = pr.grid();
  std::vector<double> pot(g.size());
  kernels::parallel::power_potential(g, u_fold.values, pr.p(), pr.a(), pot);
  for (int k = 0; k < g.size(); ++k) pot[k] *= phi_fold.values[k];
  // pot carries e^{2s}; sigma = -2 removes it.
  return kernels::parallel::weighted_dot(g, pot, h.values, -2.0);
}

}  // namespace conebif
