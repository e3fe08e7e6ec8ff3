#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "conebif/cone_geometry.hpp"

namespace conebif {

struct GridSpec {
  double s_min = -6.0;
  double s_max = 6.0;
  int n_s = 241;
  int n_theta = 33;
};

enum class NodeKind { interior, lateral, radial_end };

/// Tensor grid in (s, theta) with s = log r, covering the truncated cone
/// {e^{s_min} < |x| < e^{s_max}}. Node (i, j) is stored at i * n_theta + j,
/// so the angular index runs fastest.
class Grid {
 public:
  Grid(const ConeSpec& cone, const GridSpec& spec);

  const ConeSpec& cone() const { return cone_; }
  const GridSpec& spec() const { return spec_; }
  const AngularStencil& angular() const { return angular_; }

  int dimension() const { return cone_.dimension; }
  int n_s() const { return spec_.n_s; }
  int n_theta() const { return spec_.n_theta; }
  int size() const { return spec_.n_s * spec_.n_theta; }
  int index(int i, int j) const { return i * spec_.n_theta + j; }

  double h_s() const { return h_s_; }
  double h_theta() const { return angular_.spacing(); }
  double max_spacing() const { return std::max(h_s_, angular_.spacing()); }

  double s(int i) const { return s_[i]; }
  double r(int i) const { return std::exp(s_[i]); }
  double theta(int j) const { return angular_.nodes()[j]; }
  const std::vector<double>& s_nodes() const { return s_; }

  NodeKind kind(int i, int j) const;
  bool is_interior(int i, int j) const { return kind(i, j) == NodeKind::interior; }

  /// Quadrature weight of node (i, j) for integrals over the cone with the
  /// measure e^{N s} ds w(theta) d theta (sphere factor dropped).
  double quad_weight(int i, int j) const;

  /// Interior nodes in storage order.
  const std::vector<int>& interior_nodes() const { return interior_; }

  /// Same cone and window with all spacings halved `times` times.
  GridSpec refined_spec(int times) const;

 private:
  ConeSpec cone_;
  GridSpec spec_;
  AngularStencil angular_;
  double h_s_;
  std::vector<double> s_;
  std::vector<int> interior_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(const ConeSpec& cone, const GridSpec& spec);

/// One real value per grid node.
struct Field {
  GridPtr grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(GridPtr g, double fill = 0.0);
  Field(GridPtr g, std::vector<double> v);

  double& operator()(int i, int j) { return values[grid->index(i, j)]; }
  double operator()(int i, int j) const { return values[grid->index(i, j)]; }
  std::span<const double> view() const { return values; }

  /// Samples f(s, theta) at every node.
  static Field sample(GridPtr g, const std::function<double(double, double)>& f);
};

double sup_abs(const Field& f);
/// Largest |f| over interior nodes only.
double sup_abs_interior(const Field& f);

/// Dirichlet data on the truncated cone. `outer` holds mu(s_i) on the edge
/// theta = theta0; `inner` holds it on theta = 0 when N = 2 (a sector has two
/// lateral edges). The radial ends default to zero and can be prescribed.
struct BoundaryData {
  std::vector<double> outer;
  std::vector<double> inner;
  std::vector<double> s_min_end;  // per angular node; empty means zero
  std::vector<double> s_max_end;
  std::optional<double> alpha;  // decay tags for the C_{alpha,beta} check
  std::optional<double> beta;

  /// mu(s) on every lateral edge of `grid`.
  static BoundaryData lateral(const Grid& grid, const std::function<double(double)>& mu);
  static BoundaryData zero(const Grid& grid);

  BoundaryData scaled(double factor) const;
  bool is_nonnegative() const;
  bool is_identically_zero() const;

  /// Boundary value at node (i, j), which must not be an interior node.
  double value(const Grid& grid, int i, int j) const;
};

}  // namespace conebif
