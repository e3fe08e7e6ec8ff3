#include "conebif/cone_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "conebif/error.hpp"
#include "tridiagonal.hpp"

namespace conebif {

namespace {

constexpr double kEigenRelTol = 1e-12;
constexpr int kEigenMaxIter = 10000;

double sphere_weight(int dimension, double theta) {
  return std::pow(std::sin(theta), dimension - 2);
}

// 5-point Gauss-Legendre of the weight over [lo, hi]; exact to rounding for cell widths used here.
double weight_integral(int dimension, double lo, double hi) {
  static constexpr double x[5] = {0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640, -0.9061798459386640};
  static constexpr double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                                  0.2369268850561891};
  const double c = 0.5 * (hi + lo), r = 0.5 * (hi - lo);
  double acc = 0.0;
  for (int q = 0; q < 5; ++q) acc += w[q] * sphere_weight(dimension, c + r * x[q]);
  return r * acc;
}

// Reduced symmetric system on the unknown nodes: stiffness (diag, off) and mass.
struct ReducedAngular {
  std::vector<double> diag;
  std::vector<double> off;  // coupling between unknowns k and k+1
  std::vector<double> mass;
  int offset = 0;
};

ReducedAngular reduce(const AngularStencil& st) {
  ReducedAngular r;
  r.offset = st.first_unknown();
  const int n = st.last_unknown() - r.offset + 1;
  r.diag.resize(n);
  r.mass.resize(n);
  r.off.resize(n > 0 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) {
    const int j = k + r.offset;
    r.mass[k] = st.mass(j);
    r.diag[k] = st.mass(j) * (st.north(j) + st.south(j));
    if (k + 1 < n) r.off[k] = -st.conductance(j);
  }
  return r;
}

}  // namespace

void ConeSpec::validate() const {
  if (dimension < 2) throw ValidationError("cone dimension must be >= 2, got " + std::to_string(dimension));
  if (!aperture && !lambda_override) throw ValidationError("cone needs an aperture or a lambda_override");
  if (lambda_override && !(*lambda_override > 0.0)) throw ValidationError("lambda_override must be positive");
  if (aperture) {
    const double t = *aperture;
    const double upper = dimension == 2 ? 2.0 * std::numbers::pi : std::numbers::pi;
    const bool ok = dimension == 2 ? (t > 0.0 && t < upper) : (t > 0.0 && t <= upper);
    if (!ok) {
      throw ValidationError("aperture " + std::to_string(t) + " outside " +
                            (dimension == 2 ? "(0, 2pi)" : "(0, pi]") + " for N=" + std::to_string(dimension));
    }
  }
}

double ConeSpec::aperture_or_throw() const {
  validate();
  if (!aperture) throw ValidationError("angular problems need an axisymmetric aperture (only lambda_override given)");
  return *aperture;
}

AngularStencil::AngularStencil(int dimension, double aperture, int n_theta)
    : dimension_(dimension), aperture_(aperture) {
  if (n_theta < 3) throw ValidationError("angular grid needs at least 3 nodes");
  spacing_ = aperture / (n_theta - 1);
  const double h = spacing_;
  nodes_.resize(n_theta);
  for (int j = 0; j < n_theta; ++j) nodes_[j] = j * h;
  nodes_.back() = aperture;

  conductance_.assign(n_theta - 1, 0.0);
  for (int j = 0; j + 1 < n_theta; ++j) {
    const double w = dimension >= 3 ? sphere_weight(dimension, (j + 0.5) * h) : 1.0;
    conductance_[j] = w / h;
  }

  // Control-volume masses: the integral of the weight over [theta_j - h/2, theta_j + h/2]
  // clipped to [0, theta0]. Point sampling h w(theta_j) leaves an O(1) row error next to
  // the axis once N >= 4.
  mass_.assign(n_theta, 0.0);
  for (int j = 0; j < n_theta; ++j) {
    const double lo = std::max(0.0, nodes_[j] - 0.5 * h);
    const double hi = std::min(aperture, nodes_[j] + 0.5 * h);
    mass_[j] = dimension >= 3 ? weight_integral(dimension, lo, hi) : hi - lo;
  }

  north_.assign(n_theta, 0.0);
  south_.assign(n_theta, 0.0);
  for (int j = first_unknown(); j <= last_unknown(); ++j) {
    north_[j] = conductance_[j] / mass_[j];
    south_[j] = j > 0 ? conductance_[j - 1] / mass_[j] : 0.0;
  }
}

bool AngularStencil::is_boundary(int j) const {
  if (j == size() - 1) return true;
  return j == 0 && !has_axis();
}

CrossSectionEigen cross_section_eigen(const ConeSpec& cone, int n_theta) {
  cone.validate();
  if (cone.lambda_override) return CrossSectionEigen{*cone.lambda_override, std::nullopt, 0};
  if (n_theta < 8) throw ValidationError("cross_section_eigen needs n_theta >= 8");

  const AngularStencil st(cone.dimension, cone.aperture_or_throw(), n_theta);
  const ReducedAngular sys = reduce(st);
  const int n = static_cast<int>(sys.diag.size());
  const detail::TridiagonalFactor factor(sys.diag, sys.off);

  std::vector<double> x(n, 1.0), y(n), rhs(n);
  double lambda = 0.0;
  int it = 0;
  for (; it < kEigenMaxIter; ++it) {
    for (int k = 0; k < n; ++k) rhs[k] = sys.mass[k] * x[k];
    factor.solve(rhs, y);
    // Rayleigh quotient of y: y^T K y = y^T M x.
    double num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k) {
      num += y[k] * rhs[k];
      den += sys.mass[k] * y[k] * y[k];
    }
    const double next = num / den;
    const double scale = 1.0 / std::sqrt(den);
    for (int k = 0; k < n; ++k) x[k] = y[k] * scale;
    if (it > 0 && std::abs(next - lambda) <= kEigenRelTol * std::abs(next)) {
      lambda = next;
      ++it;
      break;
    }
    lambda = next;
  }
  if (it >= kEigenMaxIter) throw NumericalError("cross_section_eigen: inverse iteration did not converge");

  AngularProfile psi;
  psi.theta = st.nodes();
  psi.values.assign(n_theta, 0.0);
  double peak = 0.0;
  for (int k = 0; k < n; ++k) {
    psi.values[k + sys.offset] = x[k];
    if (std::abs(x[k]) > std::abs(peak)) peak = x[k];
  }
  for (double& v : psi.values) v /= peak;
  return CrossSectionEigen{lambda, std::move(psi), it};
}

double richardson_lambda(const ConeSpec& cone, int n_theta) {
  if (cone.lambda_override) return *cone.lambda_override;
  const double coarse = cross_section_eigen(cone, n_theta).lambda;
  const double fine = cross_section_eigen(cone, 2 * n_theta - 1).lambda;
  return (4.0 * fine - coarse) / 3.0;
}

double cone_lambda(const ConeSpec& cone) {
  cone.validate();
  if (cone.lambda_override) return *cone.lambda_override;
  return richardson_lambda(cone, 2049);
}

AngularProfile tilde_phi(const ConeSpec& cone, double M, int n_theta) {
  const double aperture = cone.aperture_or_throw();
  ConeSpec plain{cone.dimension, aperture, std::nullopt};
  const double lambda_h = cross_section_eigen(plain, std::max(n_theta, 8)).lambda;
  if (!(M < lambda_h)) {
    throw ValidationError("tilde_phi: M=" + std::to_string(M) + " is not below the first eigenvalue " +
                          std::to_string(lambda_h));
  }
  const AngularStencil st(cone.dimension, aperture, n_theta);
  ReducedAngular sys = reduce(st);
  const int n = static_cast<int>(sys.diag.size());
  std::vector<double> rhs(n);
  for (int k = 0; k < n; ++k) {
    sys.diag[k] -= M * sys.mass[k];
    rhs[k] = sys.mass[k];
  }
  // Boundary value 1 moved to the right-hand side.
  rhs[n - 1] += st.conductance(st.last_unknown());
  if (!st.has_axis()) rhs[0] += st.conductance(0);

  std::vector<double> sol(n);
  detail::TridiagonalFactor(sys.diag, sys.off).solve(rhs, sol);

  AngularProfile out;
  out.theta = st.nodes();
  out.values.assign(n_theta, 1.0);
  for (int k = 0; k < n; ++k) out.values[k + sys.offset] = sol[k];
  return out;
}

}  // namespace conebif
