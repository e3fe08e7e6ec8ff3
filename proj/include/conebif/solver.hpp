#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "conebif/exponents.hpp"
#include "conebif/grid.hpp"
#include "conebif/poisson.hpp"

namespace conebif {

/// -Delta u = |x|^a u^p in the cone, u = kappa mu on the lateral boundary.
struct ProblemSpec {
  ConeSpec cone;
  double p = 3.0;
  double a = 0.0;
  GridSpec grid;
  std::function<double(double)> mu;  // lateral trace as a function of s = log r
  std::optional<double> alpha;       // decay window overrides
  std::optional<double> beta;
};

/// A validated problem with its grid, factorized operator and harmonic lift.
/// Immutable after construction; solves against it may run concurrently.
class Problem {
 public:
  explicit Problem(ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }
  double p() const { return spec_.p; }
  double a() const { return spec_.a; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Grid& grid() const { return *grid_; }
  const DiscreteOperator& op() const { return op_; }
  /// mu at kappa = 1.
  const BoundaryData& boundary() const { return boundary_; }
  /// Boundary load of mu on the interior unknowns.
  const Vector& load() const { return load_; }
  /// Harmonic lift u^1_0: zero source, boundary data mu.
  const Field& lift() const { return lift_; }
  const ExponentReport& exponents() const { return exponents_; }
  const DecayWindow& window() const { return window_; }
  /// sup over lateral nodes of mu / U_{alpha,beta}.
  double boundary_cab() const { return boundary_cab_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Same problem on another grid.
  Problem with_grid(const GridSpec& g) const;

  /// Interior vector as a field with boundary values kappa mu.
  Field field(const Vector& x, double kappa) const { return op_.extend(x, boundary_.scaled(kappa)); }

 private:
  ProblemSpec spec_;
  GridPtr grid_;
  DiscreteOperator op_;
  BoundaryData boundary_;
  Vector load_;
  Field lift_;
  ExponentReport exponents_;
  DecayWindow window_;
  double boundary_cab_ = 0.0;
  std::vector<std::string> warnings_;
};

enum class Status { converged, diverged, max_iter };
std::string to_string(Status s);

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 500;
  double blowup_factor = 1e6;  // times kappa * boundary_cab
  int growth_run = 3;          // consecutive increases of the C_{alpha,beta} norm
  int keep_iterate = -1;       // store this iterate index (for the ladder diagnostic)
};

struct IterateRecord {
  int j = 0;
  double sup = 0.0;
  double cab = 0.0;
  double step = 0.0;
};

struct IterationOutcome {
  Status status = Status::max_iter;
  double kappa = 0.0;
  Field last;                       // final iterate (the solution when converged)
  std::vector<IterateRecord> trace;
  double residual = 0.0;            // ||e^{2s}(-Delta_h u - K u^p)||_inf / ||e^{2s} K u^p||_inf (interior)
  double phi_residual = 0.0;        // ||u - kappa u^1_0 - G[K u_+^p]||_inf / ||u||_inf
  int j_reached = 0;
  double monotone_violation = 0.0;  // max (u_j - u_{j+1}) / sup u_{j+1}, 0 if monotone
  std::optional<Field> kept;

  bool converged() const { return status == Status::converged; }
};

/// Picard iteration u_{j+1} = kappa u^1_0 + G[K u_j^p] from u_{-1} = 0, or
/// from `start` if given (it must lie below the minimal solution, e.g. the
/// minimal solution at a smaller kappa).
IterationOutcome minimal_solution(const Problem& problem, double kappa, const SolverOptions& opts = {},
                                  const Field* start = nullptr);

/// Residual of the strong form at interior nodes, rows scaled by e^{2s}, relative
/// to the larger of max |K u_+^p| and the row magnitude max diag_k |u_k|.
double strong_residual(const Problem& problem, const Field& u);
/// Relative residual of the fixed-point form.
double phi_residual(const Problem& problem, const Field& u, double kappa);

struct Probe {
  double kappa = 0.0;
  Status status = Status::max_iter;
  int iterations = 0;
};

struct KappaStarResult {
  double kappa_star = 0.0;  // bracket midpoint
  double lo = 0.0;          // largest kappa that converged
  double hi = 0.0;          // smallest kappa that diverged
  std::vector<Probe> history;
  std::optional<std::pair<double, double>> undecided_gap;
  Field lower_solution;  // minimal solution at lo

  double relative_width() const { return hi / lo - 1.0; }
};

void to_json(nlohmann::json& j, const KappaStarResult& r);

/// Bisection on the converged / diverged verdict. The bracket is expanded
/// first if kappa_lo does not converge or kappa_hi does not diverge.
KappaStarResult kappa_star(const Problem& problem, double kappa_lo, double kappa_hi, double rel_tol,
                           const SolverOptions& opts = {});

struct Shell {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double sup_scaled = 0.0;
};

struct DecayReport {
  double exponent = 0.0;    // (2+a)/(p-1)
  double sup_scaled = 0.0;  // sup r^{exponent} u
  double cab = 0.0;         // C_{alpha_*, beta_*} norm
  std::vector<Shell> shells;
  std::optional<double> w_cab;  // C_{alpha_*, beta_*} norm of u - u_{j_*+1}
};

void to_json(nlohmann::json& j, const DecayReport& r);

/// Shells are R < |x| < 2R starting from the inner truncation radius.
DecayReport decay_report(const Field& u, double p, double a, const DecayWindow& window,
                         const Field* ladder_iterate = nullptr);

}  // namespace conebif
