#pragma once

#include <nlohmann/json.hpp>

#include "conebif/grid.hpp"

namespace conebif {

/// U_{alpha,beta}(x) = |x|^alpha (1 + |x|^2)^{(beta - alpha)/2}.
struct WeightedProfile {
  double alpha = 0.0;
  double beta = 0.0;

  double operator()(double r) const;
  double log_at_s(double s) const;
  Field sample(const GridPtr& grid) const;
};

double u_ab(double alpha, double beta, double r);

/// sup over grid nodes of |f| / U_{alpha,beta}.
double cab_norm(const Field& f, double alpha, double beta);

struct BarrierCertificate {
  double alpha = 0.0;
  double beta = 0.0;
  double M = 0.0;       // max{alpha(alpha+N-2), beta(beta+N-2)}
  double M_used = 0.0;  // max(M, 0), the value passed to tilde_phi
  double lambda = 0.0;
  Field V;
  double ratio_min = 0.0;  // min over interior nodes of (-Delta_h V) / U_{alpha-2,beta-2}
  double tolerance = 0.0;  // 10 h^2
  bool valid = false;
};

void to_json(nlohmann::json& j, const BarrierCertificate& c);

/// V = U_{alpha,beta} tilde_phi(theta) sampled on `grid` together with its
/// discrete Laplacian ratio. Throws ValidationError when M >= Lambda.
BarrierCertificate build_barrier(const ConeSpec& cone, double alpha, double beta, const GridPtr& grid);

struct SmallKappa {
  double delta = 0.0;
  double kappa0 = 0.0;
};

void to_json(nlohmann::json& j, const SmallKappa& s);

/// delta = min ((-Delta_h V) / (K V^p))^{1/(p-1)} over interior nodes, so
/// delta V is a discrete supersolution, and kappa0 = delta * min V/mu over
/// boundary nodes where mu > 0. K = |x|^a.
SmallKappa small_kappa_certificate(const BarrierCertificate& cert, double p, double a, const BoundaryData& mu);

}  // namespace conebif
