#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include <nlohmann/json.hpp>

#include "conebif/barriers.hpp"
#include "conebif/cone_geometry.hpp"
#include "conebif/continuation.hpp"
#include "conebif/error.hpp"
#include "conebif/exponents.hpp"
#include "conebif/io.hpp"
#include "conebif/solver.hpp"
#include "conebif/stability.hpp"
#include "conebif/verification.hpp"

namespace conebif::cli {

namespace {

using nlohmann::json;

constexpr double kMaxPrincipleFloor = -1e-10;
constexpr double kNearOptimizerTarget = 0.9;
constexpr int kSuiteSize = 50;

json exponent_json(const RunConfig& c) {
  const double lambda = cone_lambda(c.cone);
  const ExponentReport rep = admissible_range(c.cone.dimension, lambda, c.a);
  json j = rep;
  j["lambda_source"] = c.cone.lambda_override ? "override" : "richardson";
  j["p"] = c.p;
  j["p_admissible"] = rep.admits(c.p);
  j["p_above_p_star"] = c.p > rep.p_star;
  if (rep.solvable && c.p > rep.p_star) {
    try {
      j["window"] = decay_window(c.p, rep.gamma, c.cone.dimension, c.a, c.alpha, c.beta);
    } catch (const ValidationError& e) {
      j["window"] = nullptr;
      j["window_error"] = e.what();
    }
  }
  return j;
}

// Every pipeline leaves the admissibility report next to its own outputs.
void emit_exponents(const Context& ctx) { io::write_json(ctx.out / "exponents.json", exponent_json(ctx.config), ctx.hash); }

SolverOptions probe_options(const RunConfig& c) {
  SolverOptions o = c.solver;
  o.max_iter = std::max(o.max_iter, c.bisection.max_iter);
  return o;
}

void print_summary(const json& j) { std::cout << j.dump(2) << '\n'; }

json problem_json(const Problem& pr) {
  return {{"warnings", pr.warnings()}, {"window", pr.window()}, {"boundary_cab", pr.boundary_cab()}};
}

// lambda at the bracket midpoint when it converges, otherwise at kappa_lo.
struct BracketLambda {
  double kappa = 0.0;
  std::string at;
  EigenPair pair;
};

BracketLambda bracket_lambda(const Problem& pr, const KappaStarResult& ks, const SolverOptions& opts) {
  BracketLambda out;
  const IterationOutcome mid = minimal_solution(pr, ks.kappa_star, opts, &ks.lower_solution);
  if (mid.converged()) {
    out.kappa = ks.kappa_star;
    out.at = "midpoint";
    out.pair = first_eigenpair(pr.op(), mid.last, pr.p(), pr.a());
  } else {
    out.kappa = ks.lo;
    out.at = "kappa_lo";
    out.pair = first_eigenpair(pr.op(), ks.lower_solution, pr.p(), pr.a());
  }
  return out;
}

json bracket_json(const KappaStarResult& ks, const BracketLambda& bl) {
  json j = ks;
  j["lambda"] = bl.pair.lambda;
  j["lambda_kappa"] = bl.kappa;
  j["lambda_at"] = bl.at;
  j["lambda_residual"] = bl.pair.residual;
  j["note"] = "the bracket bounds the discrete extremal kappa; no claim is made about the verdict at kappa* itself";
  return j;
}

void save_probes(const Context& ctx, const KappaStarResult& ks) {
  io::Csv runs(ctx.hash, {"kappa", "status", "iterations"});
  for (const Probe& p : ks.history) runs.row({io::number(p.kappa), to_string(p.status), std::to_string(p.iterations)});
  runs.save(ctx.out / "runs.csv");
}

}  // namespace

Context make_context(const std::string& config_path, const std::string& out_dir, int refine) {
  Context ctx;
  ctx.config = config_path.empty() ? RunConfig::canonical() : load_config(config_path);
  ctx.config = ctx.config.refined(refine);
  if (!out_dir.empty()) ctx.config.output_dir = out_dir;
  ctx.out = ctx.config.output_dir;
  ctx.hash = config_hash(ctx.config);
  ctx.refine = refine;
  return ctx;
}

int cmd_exponents(const Context& ctx) {
  json j = exponent_json(ctx.config);
  const ExponentReport rep = admissible_range(ctx.config.cone.dimension, j.at("Lambda").get<double>(), ctx.config.a);
  int rc = 0;
  if (!rep.solvable) {
    j["note"] = "p_star <= 1: no exponent p > 1 lies above the existence threshold";
    rc = 2;
  } else if (rep.range_case == RangeCase::iv) {
    j["note"] =
        "case iv: no p in (p_star, p_JL) with H_a(p-1) < 0, so the fold and multiplicity hypotheses fail; "
        "existence of minimal solutions for small kappa still holds for p > p_star";
    rc = 2;
  }
  print_summary(j);
  io::write_json(ctx.out / "exponents.json", j, ctx.hash);
  if (rc != 0) std::cerr << j.at("note").get<std::string>() << '\n';
  return rc;
}

int cmd_eigen_cap(const Context& ctx) {
  const ConeSpec& cone = ctx.config.cone;
  json j = {{"dimension", cone.dimension}, {"n_theta", ctx.config.grid.n_theta}};
  if (cone.lambda_override) {
    j["lambda"] = *cone.lambda_override;
    j["source"] = "override";
  } else {
    const CrossSectionEigen e = cross_section_eigen(cone, ctx.config.grid.n_theta);
    j["aperture"] = *cone.aperture;
    j["lambda_h"] = e.lambda;
    j["iterations"] = e.iterations;
    j["lambda_richardson"] = richardson_lambda(cone, ctx.config.grid.n_theta);
    j["lambda"] = cone_lambda(cone);
    j["source"] = "eigensolve";
    io::write_profile_csv(ctx.out / "psi.csv", *e.psi, ctx.hash);
  }
  emit_exponents(ctx);
  print_summary(j);
  io::write_json(ctx.out / "eigen_cap.json", j, ctx.hash);
  return 0;
}

int cmd_solve(const Context& ctx) {
  emit_exponents(ctx);
  const RunConfig& c = ctx.config;
  const Problem pr(c.problem_spec());
  SolverOptions opts = c.solver;
  opts.keep_iterate = pr.window().j_star + 1;
  const IterationOutcome out = minimal_solution(pr, c.kappa, opts);

  io::Csv trace(ctx.hash, {"j", "sup_u", "cab_norm", "step"});
  for (const IterateRecord& r : out.trace) trace.row({static_cast<double>(r.j), r.sup, r.cab, r.step});
  trace.save(ctx.out / "solve_trace.csv");

  const double cab = cab_norm(out.last, pr.window().alpha, pr.window().beta);
  io::Csv runs(ctx.hash, {"kappa", "status", "sup_u", "cab_norm", "residual", "j_reached"});
  runs.row({io::number(c.kappa), to_string(out.status), io::number(sup_abs(out.last)), io::number(cab),
            io::number(out.residual), std::to_string(out.j_reached)});
  runs.save(ctx.out / "runs.csv");

  json j = {{"kappa", c.kappa},
            {"status", to_string(out.status)},
            {"iterations", out.j_reached},
            {"sup_u", sup_abs(out.last)},
            {"cab_norm", cab},
            {"problem", problem_json(pr)}};
  if (out.converged()) {
    j["residual"] = out.residual;
    j["phi_residual"] = out.phi_residual;
    j["monotone_violation"] = out.monotone_violation;
    j["decay"] = decay_report(out.last, pr.p(), pr.a(), pr.window(), out.kept ? &*out.kept : nullptr);
    j["eigen"] = first_eigenpair(pr.op(), out.last, pr.p(), pr.a());
    io::write_field_csv(ctx.out / "solution.csv", out.last, ctx.hash);
  }
  print_summary(j);
  io::write_json(ctx.out / "solve.json", j, ctx.hash);
  // Divergence is a verdict (kappa above the extremal value), not a failure.
  return out.status == Status::max_iter ? 3 : 0;
}

int cmd_kappa_star(const Context& ctx) {
  emit_exponents(ctx);
  const RunConfig& c = ctx.config;
  const Problem pr(c.problem_spec());
  const SolverOptions opts = probe_options(c);
  const KappaStarResult ks = kappa_star(pr, c.bisection.kappa_lo, c.bisection.kappa_hi, c.bisection.rel_tol, opts);
  const BracketLambda bl = bracket_lambda(pr, ks, opts);
  save_probes(ctx, ks);
  json j = bracket_json(ks, bl);
  j["problem"] = problem_json(pr);
  print_summary(j);
  io::write_json(ctx.out / "kappa_star.json", j, ctx.hash);
  return 0;
}

int cmd_branch(const Context& ctx) {
  emit_exponents(ctx);
  const RunConfig& c = ctx.config;
  const Problem pr(c.problem_spec());
  const SolverOptions opts = probe_options(c);
  const KappaStarResult ks = kappa_star(pr, c.bisection.kappa_lo, c.bisection.kappa_hi, c.bisection.rel_tol, opts);
  save_probes(ctx, ks);
  const BifurcationDiagram d = trace_branch(pr, c.branch_kappa_start, c.continuation);

  io::Csv csv(ctx.hash, {"index", "s", "kappa", "sup_u", "cab_norm", "lambda1", "decay_sup", "residual"});
  for (std::size_t k = 0; k < d.points.size(); ++k) {
    const BranchPoint& b = d.points[k];
    csv.row({static_cast<double>(k), b.arclength, b.kappa, b.sup_u, b.cab, b.lambda, b.decay_sup, b.residual});
  }
  csv.save(ctx.out / "diagram.csv");

  json j = {{"diagram", d}, {"bracket", ks}, {"problem", problem_json(pr)}, {"ds", c.continuation.ds}};
  if (!d.fold_index) {
    j["error"] = "no fold within the step budget";
    io::write_json(ctx.out / "branch.json", j, ctx.hash);
    throw NumericalError("branch: no fold reached within " + std::to_string(c.continuation.max_steps) + " steps");
  }
  const double fold = d.points[*d.fold_index].kappa;
  j["fold_kappa"] = fold;
  j["fold_inside_bracket"] = ks.lo <= d.kappa_star_estimate && d.kappa_star_estimate <= ks.hi;
  j["kappa_lower_estimate_note"] = "upper bound on kappa_lower within this grid and branch";

  // Multiplicity at 0.9 of the fold, when the traced upper branch reaches it.
  const double kp = 0.9 * fold;
  if (d.kappa_lower_estimate < kp) {
    const PairAtKappa pair = solution_pair(pr, d, kp, c.continuation.newton);
    double min_gap = std::numeric_limits<double>::infinity();
    Field diff(pr.grid_ptr());
    for (int k : pr.grid().interior_nodes()) {
      diff.values[k] = pair.upper.values[k] - pair.lower.values[k];
      min_gap = std::min(min_gap, diff.values[k]);
    }
    const BranchPoint& f = d.points[*d.fold_index];
    const EigenPair fe = first_eigenpair(pr.op(), f.u, pr.p(), pr.a());
    j["pair"] = {{"kappa", kp},
                 {"min_upper_minus_lower", min_gap},
                 {"lower_residual", pair.lower_residual},
                 {"upper_residual", pair.upper_residual},
                 {"separating_functional", separating_functional(pr, f.u, fe.phi, diff)}};
    io::write_field_csv(ctx.out / "upper.csv", pair.upper, ctx.hash);
    io::write_field_csv(ctx.out / "lower.csv", pair.lower, ctx.hash);
  } else {
    j["pair"] = nullptr;
  }
  print_summary(j);
  io::write_json(ctx.out / "branch.json", j, ctx.hash);
  return 0;
}

int cmd_verify(const Context& ctx) {
  emit_exponents(ctx);
  const RunConfig& c = ctx.config;
  const Problem pr(c.problem_spec());
  json j = {{"problem", problem_json(pr)}};
  bool ok = true;

  const BarrierCheck bc = barrier_check(pr, c.solver);
  j["barrier"] = bc;
  ok = ok && bc.passed;

  const MmsStudy mms = mms_study(c.cone, c.grid, 3, pr.window().alpha, pr.window().beta);
  const bool mms_ok = std::all_of(mms.orders.begin(), mms.orders.end(), [](double o) { return o >= 1.8 && o <= 2.2; });
  j["mms"] = mms;
  j["mms"]["passed"] = mms_ok;
  ok = ok && mms_ok;

  const double worst = max_principle_suite(pr.op(), kSuiteSize, c.seed);
  j["max_principle"] = {{"worst_min", worst}, {"floor", kMaxPrincipleFloor}, {"passed", worst >= kMaxPrincipleFloor}};
  ok = ok && worst >= kMaxPrincipleFloor;

  const HardySuite hs = hardy_suite(pr.grid_ptr(), kSuiteSize, c.seed);
  const double near = *std::max_element(hs.near_optimizer.begin(), hs.near_optimizer.end());
  const bool hardy_ok = hs.max_ratio <= hs.bound && near > kNearOptimizerTarget;
  j["hardy"] = hs;
  j["hardy"]["passed"] = hardy_ok;
  ok = ok && hardy_ok;

  j["passed"] = ok;
  print_summary(j);
  io::write_json(ctx.out / "verify.json", j, ctx.hash);
  return ok ? 0 : 3;
}

}  // namespace conebif::cli
