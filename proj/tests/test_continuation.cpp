#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "conebif/continuation.hpp"
#include "conebif/error.hpp"
#include "fixtures.hpp"

using namespace conebif;

namespace {

const Problem& small_problem() {
  static const Problem pr(fixtures::small_spec());
  return pr;
}

SolverOptions patient() {
  SolverOptions o;
  o.max_iter = 20000;
  return o;
}

const KappaStarResult& bracket() {
  static const KappaStarResult ks = kappa_star(small_problem(), 1.0, 2.0, 1e-3, patient());
  return ks;
}

ContinuationOptions opts(double ds, int steps) {
  ContinuationOptions o;
  o.ds = ds;
  o.max_steps = steps;
  return o;
}

const BifurcationDiagram& diagram() {
  static const BifurcationDiagram d = trace_branch(small_problem(), 0.5, opts(0.05, 150));
  return d;
}

Field minimal(double kappa) {
  const IterationOutcome o = minimal_solution(small_problem(), kappa, patient());
  REQUIRE(o.converged());
  return o.last;
}

double sup_interior_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (int k : a.grid->interior_nodes()) d = std::max(d, std::abs(a.values[k] - b.values[k]));
  return d;
}

}  // namespace

TEST_CASE("residual map") {
  const Problem& pr = small_problem();
  const Field u = minimal(1.0);
  CHECK(sup_abs(residual_map(pr, u, 1.0)) < 1e-9 * sup_abs(u));

  const Field zero(pr.grid_ptr());
  CHECK(sup_abs(residual_map(pr, zero, 0.0)) == 0.0);

  // Where u <= 0 the nonlinearity is switched off: Phi = u - kappa u^1_0.
  Field neg(pr.grid_ptr());
  for (int k : pr.grid().interior_nodes()) neg.values[k] = -0.5;
  const Field phi = residual_map(pr, neg, 0.7);
  for (int k : pr.grid().interior_nodes())
    CHECK(phi.values[k] == doctest::Approx(-0.5 - 0.7 * pr.lift().values[k]).epsilon(1e-12));
  for (int k = 0; k < pr.grid().size(); ++k)
    if (!pr.grid().is_interior(k / pr.grid().n_theta(), k % pr.grid().n_theta())) CHECK(phi.values[k] == 0.0);
}

TEST_CASE("Newton returns quadratically to the minimal solution") {
  const Field u = minimal(1.1);
  Field start = u;
  for (int k : u.grid->interior_nodes()) start.values[k] *= 1.0 + 1e-3 * std::cos(0.37 * k);
  const NewtonResult r = newton_solve(small_problem(), start, 1.1);
  REQUIRE(r.converged);
  CHECK(r.residuals.back() < 1e-10);
  CHECK(sup_interior_diff(r.u, u) < 1e-8);
  const auto& res = r.residuals;
  REQUIRE(res.size() >= 3);
  for (std::size_t k = 1; k < res.size(); ++k)
    if (res[k - 1] > 1e-12) CHECK(res[k] / res[k - 1] < 0.1);
}

TEST_CASE("two Newton limits below the fold") {
  // Start from the minimal solution and from it shifted along the first eigenfunction.
  const double kappa = 0.92 * bracket().lo;
  const Field u = minimal(kappa);
  const EigenPair e = first_eigenpair(small_problem().op(), u, 3.0, 0.0);
  Field shifted = u;
  const double scale = 0.5 / sup_abs(e.phi);
  for (int k : u.grid->interior_nodes()) shifted.values[k] += scale * e.phi.values[k];
  const NewtonResult lower = newton_solve(small_problem(), u, kappa);
  const NewtonResult upper = newton_solve(small_problem(), shifted, kappa);
  REQUIRE(lower.converged);
  REQUIRE(upper.converged);
  CHECK(sup_interior_diff(lower.u, upper.u) > 0.1);
  for (int k : u.grid->interior_nodes()) CHECK(upper.u.values[k] > lower.u.values[k]);
  CHECK(first_eigenpair(small_problem().op(), upper.u, 3.0, 0.0).lambda < 1.0);
}

TEST_CASE("plain Newton fails past the fold") {
  const BifurcationDiagram& d = diagram();
  REQUIRE(d.fold_index);
  const BranchPoint& f = d.points[*d.fold_index];
  CHECK(std::abs(f.lambda - 1.0) < 0.05);  // the Jacobian is nearly singular here
  for (double factor : {1.001, 1.01}) {
    bool failed = false;
    try {
      failed = !newton_solve(small_problem(), f.u, factor * f.kappa).converged;
    } catch (const SingularJacobianError&) {
      failed = true;
    }
    CHECK(failed);
  }
}

TEST_CASE("branch through the fold") {
  const BifurcationDiagram& d = diagram();
  const KappaStarResult& ks = bracket();
  REQUIRE(d.fold_index);
  const int f = *d.fold_index;
  const auto& pts = d.points;
  CHECK(f > 2);
  CHECK(f + 2 < static_cast<int>(pts.size()));

  // Fold estimate against the bisection bracket, and a flat tangent at the fold.
  CHECK(d.kappa_star_estimate >= ks.lo);
  CHECK(d.kappa_star_estimate <= ks.hi);
  CHECK(d.fold_slope < 10.0 * 0.05);
  CHECK(std::abs(d.fold_lambda - 1.0) < 0.05);
  CHECK(d.kappa_lower_estimate < pts[f].kappa);

  for (std::size_t k = 0; k < pts.size(); ++k) {
    CAPTURE(k);
    CHECK(pts[k].residual < 1e-10);
    for (int q : small_problem().grid().interior_nodes()) REQUIRE(pts[k].u.values[q] > 0.0);
    if (k > 0) CHECK(pts[k].arclength > pts[k - 1].arclength);
    if (static_cast<int>(k) < f) CHECK(pts[k].lambda > 1.0 - 1e-3);
    if (static_cast<int>(k) > f) CHECK(pts[k].lambda < 1.0 + 1e-3);
  }
  // Increasing to the fold, then decreasing until the next turn, which lies below 0.9 of the fold.
  for (int k = 1; k <= f; ++k) CHECK(pts[k].kappa > pts[k - 1].kappa);
  int k = f + 1;
  while (k < static_cast<int>(pts.size()) && pts[k].kappa < pts[k - 1].kappa) ++k;
  CHECK(pts[k - 1].kappa < 0.9 * pts[f].kappa);
}

TEST_CASE("upper solution lies above the minimal one at 0.9 of the fold") {
  const BifurcationDiagram& d = diagram();
  const BranchPoint& f = d.points[*d.fold_index];
  const PairAtKappa pair = solution_pair(small_problem(), d, 0.9 * f.kappa);
  CHECK(pair.lower_residual < 1e-10);
  CHECK(pair.upper_residual < 1e-10);
  Field diff(small_problem().grid_ptr());
  for (int k : small_problem().grid().interior_nodes()) {
    CHECK(pair.upper.values[k] > pair.lower.values[k]);
    diff.values[k] = pair.upper.values[k] - pair.lower.values[k];
  }
  const EigenPair fe = first_eigenpair(small_problem().op(), f.u, 3.0, 0.0);
  CHECK(separating_functional(small_problem(), f.u, fe.phi, diff) > 0.0);
  CHECK_THROWS_AS(solution_pair(small_problem(), d, 0.5 * d.kappa_lower_estimate), ValidationError);
}

TEST_CASE("halving ds moves the fold by less than four times the vertex correction") {
  const BifurcationDiagram& d1 = diagram();
  const BifurcationDiagram d2 = trace_branch(small_problem(), 0.5, opts(0.025, 120));
  REQUIRE(d2.fold_index);
  // The parabola-vertex correction over the sampled maximum measures the ds error of the estimate.
  const double correction = std::abs(d1.kappa_star_estimate - d1.points[*d1.fold_index].kappa);
  const double floor = 1e-9 * d1.kappa_star_estimate;
  CHECK(std::abs(d2.kappa_star_estimate - d1.kappa_star_estimate) <= 4.0 * std::max(correction, floor));
}

TEST_CASE("continuation input validation") {
  CHECK_THROWS_AS(trace_branch(small_problem(), 0.5, opts(0.0, 10)), ValidationError);
  CHECK_THROWS_AS(trace_branch(small_problem(), 50.0, opts(0.05, 10)), NumericalError);
}
