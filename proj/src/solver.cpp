#include "conebif/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conebif/barriers.hpp"
#include "conebif/error.hpp"
#include "conebif/kernels.hpp"

namespace conebif {

namespace {

double sup_interior(const Vector& x) { return x.size() ? x.lpNorm<Eigen::Infinity>() : 0.0; }

// e^{2s} K u_+^p restricted to the interior unknowns.
Vector source_vector(const Problem& pr, const Field& u) {
  std::vector<double> src(pr.grid().size());
  kernels::parallel::power_source(pr.grid(), u.values, pr.p(), pr.a(), src);
  const auto& nodes = pr.grid().interior_nodes();
  Vector out(nodes.size());
  for (int k = 0; k < static_cast<int>(nodes.size()); ++k) out[k] = src[nodes[k]];
  return out;
}

}  // namespace

Problem::Problem(ProblemSpec spec)
    : spec_(std::move(spec)),
      grid_(make_grid(spec_.cone, spec_.grid)),
      op_(build_laplacian(grid_)) {
  spec_.cone.validate();
  if (!spec_.mu) throw ValidationError("problem: boundary datum mu is missing");
  const int N = spec_.cone.dimension;
  const double lambda = cone_lambda(spec_.cone);
  exponents_ = admissible_range(N, lambda, spec_.a);
  if (!exponents_.solvable) throw ValidationError("problem: p*_{a,gamma} <= 1, no admissible exponent");
  if (!(spec_.p > exponents_.p_star))
    throw ValidationError("problem: p = " + std::to_string(spec_.p) + " must exceed p* = " +
                          std::to_string(exponents_.p_star));
  if (!exponents_.admits(spec_.p))
    warnings_.push_back("p lies outside the admissible intervals; multiplicity is not guaranteed");
  window_ = decay_window(spec_.p, exponents_.gamma, N, spec_.a, spec_.alpha, spec_.beta);

  boundary_ = BoundaryData::lateral(*grid_, spec_.mu);
  boundary_.alpha = window_.alpha;
  boundary_.beta = window_.beta;
  if (!boundary_.is_nonnegative()) throw ValidationError("problem: mu must be nonnegative");
  if (boundary_.is_identically_zero()) throw ValidationError("problem: mu must not vanish identically");

  load_ = op_.boundary_load(boundary_);
  lift_ = op_.extend(op_.solve(load_), boundary_);

  const WeightedProfile U{window_.alpha, window_.beta};
  for (int i = 0; i < grid_->n_s(); ++i) {
    const double m = std::max(boundary_.outer[i], boundary_.inner.empty() ? 0.0 : boundary_.inner[i]);
    boundary_cab_ = std::max(boundary_cab_, m * std::exp(-U.log_at_s(grid_->s(i))));
  }
  if (!std::isfinite(boundary_cab_)) throw ValidationError("problem: mu has infinite C_{alpha,beta} norm");
}

Problem Problem::with_grid(const GridSpec& g) const {
  ProblemSpec s = spec_;
  s.grid = g;
  return Problem(std::move(s));
}

std::string to_string(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::diverged: return "diverged";
    case Status::max_iter: return "max_iter";
  }
  return "unknown";
}

double strong_residual(const Problem& pr, const Field& u) {
  // Rows stay in the assembled e^{2s} scaling; unscaling would multiply the
  // rounding error of the rows near s_min by e^{-2 s_min}. The scale is the
  // row magnitude diag_k |u_k|: both sides of the equation scale like
  // kappa^p for small kappa while their rounding error scales like kappa.
  const Grid& g = pr.grid();
  std::vector<double> lu(g.size()), src(g.size());
  kernels::parallel::apply_laplacian(g, u.values, lu);
  kernels::parallel::power_source(g, u.values, pr.p(), pr.a(), src);
  const Vector diag = pr.op().matrix().diagonal();
  const auto& nodes = g.interior_nodes();
  double num = 0.0, den = 0.0;
  for (int r = 0; r < static_cast<int>(nodes.size()); ++r) {
    const int k = nodes[r];
    num = std::max(num, std::abs(lu[k] - src[k]));
    den = std::max({den, std::abs(src[k]), diag[r] * std::abs(u.values[k])});
  }
  return den > 0.0 ? num / den : num;
}

double phi_residual(const Problem& pr, const Field& u, double kappa) {
  const Vector x = pr.op().restrict_interior(u);
  const Vector gx = pr.op().solve(source_vector(pr, u));
  const Vector lift = pr.op().restrict_interior(pr.lift());
  const Vector phi = x - kappa * lift - gx;
  const double scale = sup_interior(x);
  return scale > 0.0 ? sup_interior(phi) / scale : sup_interior(phi);
}

IterationOutcome minimal_solution(const Problem& pr, double kappa, const SolverOptions& opts, const Field* start) {
  if (!(kappa > 0.0)) throw ValidationError("minimal_solution: kappa must be positive");
  IterationOutcome out;
  out.kappa = kappa;
  const DiscreteOperator& op = pr.op();
  const BoundaryData bc = pr.boundary().scaled(kappa);
  const Vector base = kappa * op.restrict_interior(pr.lift());
  const double threshold = opts.blowup_factor * kappa * pr.boundary_cab();
  const double alpha = pr.window().alpha, beta = pr.window().beta;

  Vector x;
  if (start) {
    if (start->grid.get() != &pr.grid()) throw ValidationError("minimal_solution: start lives on another grid");
    x = op.restrict_interior(*start);
  } else {
    x = base;  // u_0 = kappa u^1_0
  }
  Field u = op.extend(x, bc);
  double prev_cab = cab_norm(u, alpha, beta);
  int growth = 0;
  out.trace.push_back({0, sup_interior(x), prev_cab, 0.0});
  if (opts.keep_iterate == 0) out.kept = u;

  for (int j = 1; j <= opts.max_iter; ++j) {
    const Vector next = base + op.solve(source_vector(pr, u));
    const double sup = sup_interior(next);
    const double step = sup_interior(next - x);
    const Vector drop = x - next;
    if (sup > 0.0) out.monotone_violation = std::max(out.monotone_violation, drop.maxCoeff() / sup);
    x = next;
    u = op.extend(x, bc);
    out.j_reached = j;
    if (j == opts.keep_iterate) out.kept = u;

    if (!std::isfinite(sup)) {
      out.status = Status::diverged;
      out.trace.push_back({j, sup, std::numeric_limits<double>::infinity(), step});
      out.last = u;
      return out;
    }
    const double cab = cab_norm(u, alpha, beta);
    out.trace.push_back({j, sup, cab, step});
    growth = cab > prev_cab ? growth + 1 : 0;
    prev_cab = cab;
    if (cab > threshold && growth >= opts.growth_run) {
      out.status = Status::diverged;
      out.last = u;
      return out;
    }
    if (step <= opts.tol * sup) {
      out.residual = strong_residual(pr, u);
      if (out.residual <= opts.tol) {
        out.status = Status::converged;
        out.phi_residual = phi_residual(pr, u, kappa);
        out.last = u;
        return out;
      }
    }
  }
  out.status = Status::max_iter;
  out.residual = strong_residual(pr, u);
  out.last = u;
  return out;
}

void to_json(nlohmann::json& j, const KappaStarResult& r) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& p : r.history)
    hist.push_back({{"kappa", p.kappa}, {"status", to_string(p.status)}, {"iterations", p.iterations}});
  j = {{"kappa_star", r.kappa_star}, {"kappa_lo", r.lo}, {"kappa_hi", r.hi},
       {"relative_width", r.relative_width()}, {"history", hist}};
  if (r.undecided_gap) j["undecided_gap"] = {r.undecided_gap->first, r.undecided_gap->second};
  else j["undecided_gap"] = nullptr;
}

KappaStarResult kappa_star(const Problem& pr, double kappa_lo, double kappa_hi, double rel_tol,
                           const SolverOptions& opts) {
  if (!(kappa_lo > 0.0 && kappa_hi > kappa_lo)) throw ValidationError("kappa_star: need 0 < kappa_lo < kappa_hi");
  if (!(rel_tol > 0.0)) throw ValidationError("kappa_star: rel_tol must be positive");
  KappaStarResult res;
  auto probe = [&](double k, const Field* warm) {
    IterationOutcome o = minimal_solution(pr, k, opts, warm);
    res.history.push_back({k, o.status, o.j_reached});
    return o;
  };

  IterationOutcome low = probe(kappa_lo, nullptr);
  for (int t = 0; !low.converged(); ++t) {
    if (t == 60) throw NumericalError("kappa_star: no converging kappa found below the bracket");
    if (low.status == Status::diverged) kappa_hi = kappa_lo;
    kappa_lo *= 0.5;
    low = probe(kappa_lo, nullptr);
  }
  res.lower_solution = low.last;
  for (int t = 0;; ++t) {
    if (t == 60) throw NumericalError("kappa_star: no diverging kappa found above the bracket");
    IterationOutcome high = probe(kappa_hi, &res.lower_solution);
    if (high.status == Status::diverged) break;
    if (high.converged()) {
      kappa_lo = kappa_hi;
      res.lower_solution = high.last;
    }
    kappa_hi *= 2.0;
  }

  while (kappa_hi / kappa_lo - 1.0 >= rel_tol) {
    const double mid = 0.5 * (kappa_lo + kappa_hi);
    IterationOutcome o = probe(mid, &res.lower_solution);
    if (o.converged()) {
      kappa_lo = mid;
      res.lower_solution = o.last;
    } else if (o.status == Status::diverged) {
      kappa_hi = mid;
    } else {
      res.undecided_gap = std::make_pair(kappa_lo, kappa_hi);
      break;
    }
  }
  res.lo = kappa_lo;
  res.hi = kappa_hi;
  res.kappa_star = 0.5 * (kappa_lo + kappa_hi);
  return res;
}

void to_json(nlohmann::json& j, const DecayReport& r) {
  nlohmann::json shells = nlohmann::json::array();
  for (const auto& s : r.shells) shells.push_back({{"r_lo", s.r_lo}, {"r_hi", s.r_hi}, {"sup_scaled", s.sup_scaled}});
  j = {{"exponent", r.exponent}, {"sup_scaled", r.sup_scaled}, {"cab", r.cab}, {"shells", shells}};
  j["w_cab"] = r.w_cab ? nlohmann::json(*r.w_cab) : nlohmann::json(nullptr);
}

DecayReport decay_report(const Field& u, double p, double a, const DecayWindow& window, const Field* ladder_iterate) {
  const Grid& g = *u.grid;
  DecayReport rep;
  rep.exponent = (2.0 + a) / (p - 1.0);
  const double log2 = std::log(2.0);
  const int n_shells = std::max(1, static_cast<int>(std::ceil((g.s(g.n_s() - 1) - g.s(0)) / log2)));
  rep.shells.resize(n_shells);
  for (int k = 0; k < n_shells; ++k) {
    rep.shells[k].r_lo = std::exp(g.s(0) + k * log2);
    rep.shells[k].r_hi = 2.0 * rep.shells[k].r_lo;
  }
  for (int i = 0; i < g.n_s(); ++i) {
    double m = 0.0;
    for (int j = 0; j < g.n_theta(); ++j) m = std::max(m, std::abs(u(i, j)));
    const double v = m * std::exp(rep.exponent * g.s(i));
    rep.sup_scaled = std::max(rep.sup_scaled, v);
    const int k = std::min(n_shells - 1, static_cast<int>((g.s(i) - g.s(0)) / log2));
    rep.shells[k].sup_scaled = std::max(rep.shells[k].sup_scaled, v);
  }
  rep.cab = cab_norm(u, window.alpha_star, window.beta_star);
  if (ladder_iterate) {
    Field w = u;
    for (std::size_t k = 0; k < w.values.size(); ++k) w.values[k] -= ladder_iterate->values[k];
    rep.w_cab = cab_norm(w, window.alpha_star, window.beta_star);
  }
  return rep;
}

}  // namespace conebif
