#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

#include "conebif/poisson.hpp"
#include "conebif/solver.hpp"

namespace conebif {

struct EigenOptions {
  double tol = 1e-11;  // relative residual target
  int max_iter = 5000;
  bool random_start = false;
  std::uint64_t seed = 0;
};

/// First eigenpair of -Delta phi = lambda p K u^{p-1} phi with zero boundary
/// data. phi is positive at interior nodes and has unit Dirichlet energy.
struct EigenPair {
  double lambda = 0.0;
  Field phi;
  double residual = 0.0;  // ||A phi - lambda B phi|| / ||lambda B phi|| in the quadrature norm
  int iterations = 0;
};

void to_json(nlohmann::json& j, const EigenPair& e);

/// Inverse power iteration reusing the factorization of `op`.
EigenPair first_eigenpair(const DiscreteOperator& op, const Field& u, double p, double a,
                          const EigenOptions& opts = {});

struct StabilityMargin {
  double kappa = 0.0;
  double lambda = 0.0;
  double margin = 0.0;  // lambda - 1
  IterationOutcome outcome;
  EigenPair pair;
};

/// Minimal solution at kappa followed by its first eigenpair. Throws
/// NumericalError when the minimal solution does not converge.
StabilityMargin stability_margin(const Problem& problem, double kappa, const SolverOptions& sopts = {},
                                 const EigenOptions& eopts = {});

/// Generalized Rayleigh quotient E(psi) / int p K u^{p-1} psi^2.
double rayleigh_quotient(const Field& psi, const Field& u, double p, double a);

}  // namespace conebif
