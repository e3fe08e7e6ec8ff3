#pragma once

#include <optional>
#include <vector>

namespace conebif {

/// Infinite cone {r theta : r > 0, theta in A}. A is an axisymmetric cap of
/// half-aperture `aperture` on S^{N-1} (N >= 3) or a planar sector of opening
/// `aperture` (N = 2). A general cross section can be described only through
/// its first Dirichlet eigenvalue via `lambda_override`.
struct ConeSpec {
  int dimension = 3;
  std::optional<double> aperture;
  std::optional<double> lambda_override;

  void validate() const;
  double aperture_or_throw() const;
};

struct AngularProfile {
  std::vector<double> theta;
  std::vector<double> values;
};

/// Second-order finite-volume discretization of -Delta' on the cross section.
///
/// For N >= 3 the operator is -(1/w)(w u')' with w = sin^{N-2}(theta); node 0
/// sits on the axis with the half cell [0, h/2], so its row tends to the
/// ghost-node stencil 2(N-1)(u_0 - u_1)/h^2; node n-1 is the Dirichlet edge
/// theta = theta0. Masses m_j are integrals of w over the control volumes.
/// For N = 2 it is -u'' with Dirichlet data at both ends.
///
/// Row j reads (1/m_j) [c_{j+1/2}(u_j - u_{j+1}) + c_{j-1/2}(u_j - u_{j-1})],
/// so diag(m) times the operator is symmetric.
class AngularStencil {
 public:
  AngularStencil(int dimension, double aperture, int n_theta);

  int size() const { return static_cast<int>(nodes_.size()); }
  int dimension() const { return dimension_; }
  double aperture() const { return aperture_; }
  double spacing() const { return spacing_; }
  const std::vector<double>& nodes() const { return nodes_; }

  bool is_boundary(int j) const;
  bool has_axis() const { return dimension_ >= 3; }
  int first_unknown() const { return has_axis() ? 0 : 1; }
  int last_unknown() const { return size() - 2; }

  /// Control-volume mass of node j (trapezoid weight on Dirichlet edges).
  double mass(int j) const { return mass_[j]; }
  /// Edge conductance c_{j+1/2} between nodes j and j+1.
  double conductance(int j) const { return conductance_[j]; }
  /// Coupling to j+1 and j-1 in the row of node j (zero across the axis).
  double north(int j) const { return north_[j]; }
  double south(int j) const { return south_[j]; }

 private:
  int dimension_;
  double aperture_;
  double spacing_;
  std::vector<double> nodes_;
  std::vector<double> mass_;
  std::vector<double> conductance_;
  std::vector<double> north_;
  std::vector<double> south_;
};

struct CrossSectionEigen {
  double lambda = 0.0;
  std::optional<AngularProfile> psi;  // absent when lambda_override is used
  int iterations = 0;
};

/// Smallest eigenvalue of the discrete angular operator and its eigenfunction
/// (max-normalized, positive inside). Inverse power iteration with shift 0.
CrossSectionEigen cross_section_eigen(const ConeSpec& cone, int n_theta);

/// Richardson extrapolation of the eigenvalue from n_theta and 2 n_theta - 1
/// nodes (spacing halved), removing the h^2 term.
double richardson_lambda(const ConeSpec& cone, int n_theta);

/// Lambda used for exponent bookkeeping: the override, or a Richardson
/// extrapolated eigenvalue on a fine angular grid.
double cone_lambda(const ConeSpec& cone);

/// Solves -Delta' phi = M phi + 1 in A, phi = 1 on the boundary of A.
/// Requires M below the discrete first eigenvalue on the same nodes.
AngularProfile tilde_phi(const ConeSpec& cone, double M, int n_theta);

}  // namespace conebif
