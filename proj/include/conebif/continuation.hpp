#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "conebif/solver.hpp"
#include "conebif/stability.hpp"

namespace conebif {

/// Phi(u, kappa) = u - kappa u^1_0 - G[K u_+^p] (zero on the boundary).
Field residual_map(const Problem& problem, const Field& u, double kappa);

struct NewtonOptions {
  double tol = 1e-10;  // on ||Phi||_inf / ||u||_inf
  int max_iter = 30;
};

struct NewtonResult {
  Field u;
  int iterations = 0;
  std::vector<double> residuals;  // relative Phi residual before each step and at the end
  bool converged = false;
};

/// Newton on the strong form (-Delta_h - p K u_+^{p-1}) h = -F at fixed kappa.
/// Throws SingularJacobianError when the Jacobian cannot be factorized.
NewtonResult newton_solve(const Problem& problem, const Field& u0, double kappa, const NewtonOptions& opts = {});

struct BranchPoint {
  double kappa = 0.0;
  Field u;
  double lambda = 0.0;
  double sup_u = 0.0;
  double cab = 0.0;
  double decay_sup = 0.0;
  double arclength = 0.0;
  double residual = 0.0;
};

struct ContinuationOptions {
  double ds = 0.05;
  int max_steps = 400;
  double kappa_floor = 0.25;  // stop once kappa < kappa_floor * fold kappa past the fold
  double sup_factor = 1e3;    // or sup u > sup_factor * sup u at the fold
  double ds_min_factor = 1e-6;
  NewtonOptions newton;
};

struct BifurcationDiagram {
  std::vector<BranchPoint> points;
  std::optional<int> fold_index;           // point with the largest kappa
  double kappa_star_estimate = 0.0;        // vertex of the parabola through the fold neighbours
  double kappa_lower_estimate = 0.0;       // smallest kappa reached past the fold
  double fold_slope = 0.0;                 // |dkappa/ds| of the smaller secant next to the fold
  double fold_lambda = 0.0;
  std::vector<double> ds_used;
};

void to_json(nlohmann::json& j, const BifurcationDiagram& d);

/// Pseudo-arclength continuation with secant tangents from the minimal
/// solution at kappa_start. The arclength inner product is the quadrature L^2
/// product on interior nodes plus kappa times kappa.
BifurcationDiagram trace_branch(const Problem& problem, double kappa_start, const ContinuationOptions& opts = {});

struct PairAtKappa {
  double kappa = 0.0;
  Field lower;
  Field upper;
  double lower_residual = 0.0;
  double upper_residual = 0.0;
};

/// Lower (minimal) and upper solutions at `kappa` past the fold: the upper
/// one by interpolating the traced upper branch and polishing with Newton.
PairAtKappa solution_pair(const Problem& problem, const BifurcationDiagram& diagram, double kappa,
                          const NewtonOptions& opts = {});

/// int p K u^{p-1} phi h with u, phi the fold solution and eigenfunction.
double separating_functional(const Problem& problem, const Field& u_fold, const Field& phi_fold, const Field& h);

}  // namespace conebif
