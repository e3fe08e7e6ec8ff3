#include "conebif/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "conebif/error.hpp"
#include "conebif/kernels.hpp"

namespace conebif {

double WeightedProfile::log_at_s(double s) const { return kernels::log_u_ab(alpha, beta, s); }

double WeightedProfile::operator()(double r) const {
  if (!(r > 0.0)) throw ValidationError("U_{alpha,beta} needs r > 0");
  return std::exp(log_at_s(std::log(r)));
}

Field WeightedProfile::sample(const GridPtr& grid) const {
  return Field::sample(grid, [this](double s, double) { return std::exp(log_at_s(s)); });
}

double u_ab(double alpha, double beta, double r) { return WeightedProfile{alpha, beta}(r); }

double cab_norm(const Field& f, double alpha, double beta) {
  return kernels::parallel::scaled_sup(*f.grid, f.values, alpha, beta);
}

void to_json(nlohmann::json& j, const BarrierCertificate& c) {
  j = {{"alpha", c.alpha},         {"beta", c.beta},           {"M", c.M},
       {"M_used", c.M_used},       {"lambda", c.lambda},       {"ratio_min", c.ratio_min},
       {"tolerance", c.tolerance}, {"valid", c.valid}};
}

void to_json(nlohmann::json& j, const SmallKappa& s) { j = {{"delta", s.delta}, {"kappa0", s.kappa0}}; }

BarrierCertificate build_barrier(const ConeSpec& cone, double alpha, double beta, const GridPtr& grid) {
  const Grid& g = *grid;
  const int N = cone.dimension;
  BarrierCertificate c;
  c.alpha = alpha;
  c.beta = beta;
  c.M = std::max(alpha * (alpha + N - 2), beta * (beta + N - 2));
  c.M_used = std::max(c.M, 0.0);
  c.lambda = cone_lambda(cone);
  if (!(c.M < c.lambda))
    throw ValidationError("barrier: M = " + std::to_string(c.M) + " is not below Lambda = " + std::to_string(c.lambda));

  const AngularProfile phi = tilde_phi(cone, c.M_used, g.n_theta());
  const WeightedProfile U{alpha, beta};
  c.V = Field(grid);
  for (int i = 0; i < g.n_s(); ++i) {
    const double ui = std::exp(U.log_at_s(g.s(i)));
    for (int j = 0; j < g.n_theta(); ++j) c.V(i, j) = ui * phi.values[j];
  }

  std::vector<double> lv(g.size());
  kernels::parallel::apply_laplacian(g, c.V.values, lv);
  c.ratio_min = std::numeric_limits<double>::infinity();
  for (int k : g.interior_nodes()) {
    const int i = k / g.n_theta();
    c.ratio_min = std::min(c.ratio_min, lv[k] * std::exp(-U.log_at_s(g.s(i))));
  }
  const double h = g.max_spacing();
  c.tolerance = 10.0 * h * h;
  c.valid = c.ratio_min >= 1.0 - c.tolerance;
  return c;
}

SmallKappa small_kappa_certificate(const BarrierCertificate& cert, double p, double a, const BoundaryData& mu) {
  if (!cert.valid) throw ValidationError("small_kappa_certificate: barrier certificate is not valid");
  if (!(p > 1.0)) throw ValidationError("small_kappa_certificate: p must exceed 1");
  if (mu.is_identically_zero()) throw ValidationError("small_kappa_certificate: mu is identically zero");
  if (!mu.is_nonnegative()) throw ValidationError("small_kappa_certificate: mu must be nonnegative");
  const Grid& g = *cert.V.grid;

  std::vector<double> lv(g.size());
  kernels::parallel::apply_laplacian(g, cert.V.values, lv);
  // log of (-Delta_h V)/(K V^p) = log(LV) - 2s - a s - p log V
  double log_min = std::numeric_limits<double>::infinity();
  for (int k : g.interior_nodes()) {
    const double s = g.s(k / g.n_theta());
    if (!(lv[k] > 0.0)) throw NumericalError("small_kappa_certificate: -Delta_h V is not positive");
    log_min = std::min(log_min, std::log(lv[k]) - (2.0 + a) * s - p * std::log(cert.V.values[k]));
  }
  SmallKappa out;
  out.delta = std::exp(log_min / (p - 1.0));

  double ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.n_s(); ++i)
    for (int j = 0; j < g.n_theta(); ++j) {
      if (g.is_interior(i, j)) continue;
      const double m = mu.value(g, i, j);
      if (m > 0.0) ratio = std::min(ratio, cert.V(i, j) / m);
    }
  out.kappa0 = out.delta * ratio;
  return out;
}

}  // namespace conebif
