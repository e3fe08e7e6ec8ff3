#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "conebif/barriers.hpp"
#include "conebif/error.hpp"
#include "conebif/solver.hpp"
#include "fixtures.hpp"

using namespace conebif;

namespace {

SolverOptions patient() {
  SolverOptions o;
  o.max_iter = 20000;
  return o;
}

const Problem& small_problem() {
  static const Problem pr(fixtures::small_spec());
  return pr;
}

const KappaStarResult& small_bracket() {
  static const KappaStarResult ks = kappa_star(small_problem(), 1.0, 2.0, 1e-3, patient());
  return ks;
}

}  // namespace

TEST_CASE("problem validation") {
  ProblemSpec s = fixtures::small_spec();
  s.p = 2.0;  // p_star of the half-space
  CHECK_THROWS_AS(Problem{s}, ValidationError);
  s = fixtures::small_spec();
  s.beta = -0.5;
  CHECK_THROWS_AS(Problem{s}, ValidationError);
  s = fixtures::small_spec();
  s.mu = [](double) { return 0.0; };
  CHECK_THROWS_AS(Problem{s}, ValidationError);
  s = fixtures::small_spec();
  s.mu = [](double x) { return x; };
  CHECK_THROWS_AS(Problem{s}, ValidationError);
  // Outside the admissible range only a warning.
  s = fixtures::small_spec();
  s.p = 2.1;
  s.beta = std::nullopt;
  s.alpha = std::nullopt;
  const Problem warn(s);
  CHECK_FALSE(warn.warnings().empty());
  CHECK(small_problem().warnings().empty());
  CHECK_THROWS_AS(minimal_solution(small_problem(), 0.0), ValidationError);
}

TEST_CASE("converged minimal solution: residuals, positivity, monotone iterates") {
  const Problem& pr = small_problem();
  const SolverOptions o = patient();
  for (double kappa : {0.2, 0.8, 1.2}) {
    CAPTURE(kappa);
    const IterationOutcome out = minimal_solution(pr, kappa, o);
    REQUIRE(out.converged());
    CHECK(out.residual < 10.0 * o.tol);
    CHECK(out.phi_residual < 10.0 * o.tol);
    CHECK(out.monotone_violation <= 1e-12);
    for (int k : pr.grid().interior_nodes()) CHECK(out.last.values[k] > 0.0);
    for (std::size_t j = 1; j < out.trace.size(); ++j) CHECK(out.trace[j].sup >= out.trace[j - 1].sup * (1 - 1e-12));
    CHECK(strong_residual(pr, out.last) == out.residual);
  }
}

TEST_CASE("large kappa diverges with growing norms") {
  const Problem& pr = small_problem();
  const IterationOutcome out = minimal_solution(pr, 10.0 * small_bracket().kappa_star);
  CHECK(out.status == Status::diverged);
  CHECK(to_string(out.status) == "diverged");
  const auto& t = out.trace;
  REQUIRE(t.size() >= 4);
  CHECK((!std::isfinite(t.back().cab) || t.back().cab > 1e6 * 10.0 * small_bracket().kappa_star * pr.boundary_cab()));
}

TEST_CASE("minimal solutions are ordered in kappa") {
  const Problem& pr = small_problem();
  const double ks = small_bracket().lo;
  std::vector<double> kappas;
  for (int k = 1; k <= 6; ++k) kappas.push_back(ks * k / 6.5);
  std::vector<Field> sols;
  for (double k : kappas) {
    const IterationOutcome o = minimal_solution(pr, k, patient());
    REQUIRE(o.converged());
    sols.push_back(o.last);
  }
  for (std::size_t a = 0; a + 1 < sols.size(); ++a) {
    const double ratio = kappas[a] / kappas[a + 1];
    for (int k : pr.grid().interior_nodes()) {
      CHECK(sols[a].values[k] <= sols[a + 1].values[k]);
      CHECK(sols[a].values[k] <= ratio * sols[a + 1].values[k] * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("warm starts from a smaller kappa reach the same solution") {
  const Problem& pr = small_problem();
  const IterationOutcome lo = minimal_solution(pr, 1.2, patient());
  const IterationOutcome cold = minimal_solution(pr, 1.25, patient());
  const IterationOutcome warm = minimal_solution(pr, 1.25, patient(), &lo.last);
  REQUIRE(cold.converged());
  REQUIRE(warm.converged());
  CHECK(warm.j_reached < cold.j_reached);
  double d = 0.0;
  for (std::size_t k = 0; k < cold.last.values.size(); ++k) d = std::max(d, std::abs(cold.last.values[k] - warm.last.values[k]));
  CHECK(d < 1e-8);
}

TEST_CASE("kappa* bracket: interval property, positivity, mu scaling") {
  const KappaStarResult& ks = small_bracket();
  CHECK(ks.lo > 0.0);
  CHECK(std::isfinite(ks.hi));
  CHECK(ks.relative_width() < 1e-3);
  CHECK_FALSE(ks.undecided_gap.has_value());
  for (const Probe& p : ks.history) {
    if (p.kappa <= ks.lo) CHECK(p.status == Status::converged);
    if (p.kappa >= ks.hi) CHECK(p.status == Status::diverged);
  }

  ProblemSpec s = fixtures::small_spec();
  s.mu = [](double x) { return 2.0 * fixtures::gaussian(x); };
  const KappaStarResult k2 = kappa_star(Problem(s), 0.5, 1.0, 1e-3, patient());
  CHECK(k2.kappa_star == doctest::Approx(0.5 * ks.kappa_star).epsilon(1e-3));
}

TEST_CASE("kappa* expands a bracket that misses it") {
  const KappaStarResult ks = kappa_star(small_problem(), 2.0, 3.0, 1e-2, patient());
  CHECK(ks.lo < small_bracket().hi);
  CHECK(ks.hi > small_bracket().lo);
  const KappaStarResult up = kappa_star(small_problem(), 0.1, 0.2, 1e-2, patient());
  CHECK(up.lo < small_bracket().hi);
  CHECK(up.hi > small_bracket().lo);
}

TEST_CASE("verdicts are stable under one refinement away from kappa*") {
  const Problem fine = small_problem().with_grid({-4, 4, 161, 33});
  const double ks = small_bracket().kappa_star;
  for (double k : {0.95 * ks, 0.99 * ks, 1.01 * ks, 1.05 * ks}) {
    CAPTURE(k);
    const Status coarse = minimal_solution(small_problem(), k, patient()).status;
    const Status refined = minimal_solution(fine, k, patient()).status;
    CHECK(coarse == refined);
    CHECK(coarse == (k < ks ? Status::converged : Status::diverged));
  }
}

TEST_CASE("truncation window sensitivity below one percent") {
  const double l2 = std::log(2.0);
  ProblemSpec wide = fixtures::small_spec();
  wide.grid = {-4 - l2, 4 + l2, 95, 17};
  const Problem pw(wide);
  const KappaStarResult kw = kappa_star(pw, 1.0, 2.0, 1e-3, patient());
  CHECK(std::abs(kw.kappa_star / small_bracket().kappa_star - 1.0) < 1e-2);
  const IterationOutcome a = minimal_solution(small_problem(), 1.0, patient());
  const IterationOutcome b = minimal_solution(pw, 1.0, patient());
  const DecayReport da = decay_report(a.last, 3.0, 0.0, small_problem().window());
  const DecayReport db = decay_report(b.last, 3.0, 0.0, pw.window());
  CHECK(std::abs(db.sup_scaled / da.sup_scaled - 1.0) < 1e-2);
}

TEST_CASE("decay report on an exact power and on solutions") {
  const GridPtr g = make_grid(fixtures::half_space(), {-4, 4, 81, 9});
  const Field pw = WeightedProfile{-1.0, -1.0}.sample(g);
  const DecayWindow w = decay_window(3.0, 1.0, 3, 0.0, 0.0, -1.5);
  const DecayReport r = decay_report(pw, 3.0, 0.0, w);
  CHECK(r.exponent == doctest::Approx(1.0));
  CHECK(r.sup_scaled == doctest::Approx(1.0).epsilon(1e-12));
  for (const Shell& s : r.shells) {
    CHECK(s.sup_scaled == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.r_hi == doctest::Approx(2.0 * s.r_lo));
  }
  CHECK(r.shells.front().r_lo == doctest::Approx(std::exp(-4.0)));

  // Decay of minimal solutions is uniform in kappa and stable when s_max grows by log 2.
  ProblemSpec longer = fixtures::small_spec();
  longer.grid = {-4, 4 + std::log(2.0), 88, 17};
  const Problem pl(longer);
  double max_a = 0.0, max_b = 0.0;
  for (double k : {0.3, 0.6, 0.9, 1.2}) {
    SolverOptions o = patient();
    o.keep_iterate = small_problem().window().j_star + 1;
    const IterationOutcome a = minimal_solution(small_problem(), k, o);
    const IterationOutcome b = minimal_solution(pl, k, patient());
    REQUIRE(a.converged());
    REQUIRE(b.converged());
    REQUIRE(a.kept.has_value());
    const DecayReport ra = decay_report(a.last, 3.0, 0.0, small_problem().window(), &*a.kept);
    max_a = std::max(max_a, ra.sup_scaled);
    max_b = std::max(max_b, decay_report(b.last, 3.0, 0.0, pl.window()).sup_scaled);
    REQUIRE(ra.w_cab.has_value());
    CHECK(std::isfinite(*ra.w_cab));
    CHECK(std::isfinite(ra.cab));
  }
  CHECK(std::abs(max_b / max_a - 1.0) < 0.05);
}

TEST_CASE("Henon weight: converges small, diverges large, decay scaled by (2+a)/(p-1)") {
  const Problem pr(fixtures::small_spec(1.0));
  CHECK(pr.window().beta == -1.75);
  const KappaStarResult ks = kappa_star(pr, 0.5, 1.0, 1e-3, patient());
  CHECK(ks.kappa_star < small_bracket().kappa_star);
  const IterationOutcome o = minimal_solution(pr, 0.5 * ks.lo, patient());
  REQUIRE(o.converged());
  const DecayReport d = decay_report(o.last, 3.0, 1.0, pr.window());
  CHECK(d.exponent == doctest::Approx(1.5));
  CHECK(std::isfinite(d.sup_scaled));
}
