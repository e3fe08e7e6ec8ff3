#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "conebif/barriers.hpp"
#include "conebif/poisson.hpp"
#include "conebif/solver.hpp"

// Self-checks shared by the `verify` subcommand and the test suites.
namespace conebif {

struct MmsLevel {
  int n_s = 0;
  int n_theta = 0;
  double h = 0.0;
  double error = 0.0;  // sup-norm error against the exact field
};

struct MmsStudy {
  std::vector<MmsLevel> levels;
  std::vector<double> orders;  // log2 of successive error ratios
};

void to_json(nlohmann::json& j, const MmsStudy& m);

/// Manufactured solution v = U_{alpha,beta}(e^s) (Theta(theta) + 1/2) with the
/// exact -Delta v as source, its lateral trace as mu and prescribed radial
/// ends. Theta = cos(pi theta / (2 theta0)) for N >= 3, sin(pi theta/theta0) for N = 2.
/// `base` is refined `levels - 1` times by halving both spacings.
MmsStudy mms_study(const ConeSpec& cone, const GridSpec& base, int levels, double alpha, double beta);

/// Exact field and source used by mms_study, sampled on `grid`.
Field mms_exact(const GridPtr& grid, double alpha, double beta);
Field mms_source(const GridPtr& grid, double alpha, double beta);
BoundaryData mms_boundary(const Grid& grid, double alpha, double beta);

/// Smallest interior value of v over `count` solves with random f >= 0 and
/// mu >= 0 (zero radial ends). Nonnegative up to rounding for an M-matrix.
double max_principle_suite(const DiscreteOperator& op, int count, std::uint64_t seed);

struct HardySuite {
  double bound = 0.0;      // 1 + 5h
  double max_ratio = 0.0;  // over the random fields
  std::vector<double> ratios;
  std::vector<double> near_optimizer;  // ratios for widening cutoffs
};

void to_json(nlohmann::json& j, const HardySuite& h);

/// Random fields e^{rho s} sum c_kl sin(k pi (s - s_min)/L) Theta_l(theta), zero on
/// the lateral boundary and at the ends, and the family e^{-(N-2)s/2} psi(theta)
/// times plateau cutoffs of growing width.
HardySuite hardy_suite(const GridPtr& grid, int count, std::uint64_t seed);

struct BarrierCheck {
  BarrierCertificate certificate;
  SmallKappa small;
  IterationOutcome outcome;  // minimal solution at kappa0
  double max_excess = 0.0;   // max (u - delta V) / sup(delta V) over nodes
  bool passed = false;
};

void to_json(nlohmann::json& j, const BarrierCheck& b);

/// Barrier certificate for the problem window and the iteration at kappa0.
BarrierCheck barrier_check(const Problem& problem, const SolverOptions& opts = {});

}  // namespace conebif
