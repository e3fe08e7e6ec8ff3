#include "conebif/grid.hpp"

#include <algorithm>
#include <string>

#include "conebif/error.hpp"

namespace conebif {

Grid::Grid(const ConeSpec& cone, const GridSpec& spec)
    : cone_(cone), spec_(spec), angular_(cone.dimension, cone.aperture_or_throw(), spec.n_theta) {
  if (!(spec.s_min < spec.s_max)) throw ValidationError("grid: s_min must be below s_max");
  if (spec.n_s < 3) throw ValidationError("grid: n_s must be >= 3");
  if (spec.n_theta < 3) throw ValidationError("grid: n_theta must be >= 3");
  h_s_ = (spec.s_max - spec.s_min) / (spec.n_s - 1);
  s_.resize(spec.n_s);
  for (int i = 0; i < spec.n_s; ++i) s_[i] = spec.s_min + i * h_s_;
  s_.back() = spec.s_max;
  for (int i = 0; i < spec.n_s; ++i)
    for (int j = 0; j < spec.n_theta; ++j)
      if (is_interior(i, j)) interior_.push_back(index(i, j));
}

NodeKind Grid::kind(int i, int j) const {
  if (i == 0 || i == spec_.n_s - 1) return NodeKind::radial_end;
  if (angular_.is_boundary(j)) return NodeKind::lateral;
  return NodeKind::interior;
}

double Grid::quad_weight(int i, int j) const {
  double w = std::exp(dimension() * s_[i]) * h_s_ * angular_.mass(j);
  if (i == 0 || i == spec_.n_s - 1) w *= 0.5;
  return w;
}

GridSpec Grid::refined_spec(int times) const {
  GridSpec g = spec_;
  for (int k = 0; k < times; ++k) {
    g.n_s = 2 * (g.n_s - 1) + 1;
    g.n_theta = 2 * (g.n_theta - 1) + 1;
  }
  return g;
}

GridPtr make_grid(const ConeSpec& cone, const GridSpec& spec) { return std::make_shared<const Grid>(cone, spec); }

Field::Field(GridPtr g, double fill) : grid(std::move(g)) { values.assign(grid->size(), fill); }

Field::Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid->size()) throw ValidationError("field size does not match grid");
}

Field Field::sample(GridPtr g, const std::function<double(double, double)>& f) {
  Field out(g);
  for (int i = 0; i < g->n_s(); ++i)
    for (int j = 0; j < g->n_theta(); ++j) out(i, j) = f(g->s(i), g->theta(j));
  return out;
}

double sup_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double sup_abs_interior(const Field& f) {
  double m = 0.0;
  for (int k : f.grid->interior_nodes()) m = std::max(m, std::abs(f.values[k]));
  return m;
}

BoundaryData BoundaryData::lateral(const Grid& grid, const std::function<double(double)>& mu) {
  BoundaryData b;
  b.outer.resize(grid.n_s());
  for (int i = 0; i < grid.n_s(); ++i) b.outer[i] = mu(grid.s(i));
  if (!grid.angular().has_axis()) b.inner = b.outer;
  return b;
}

BoundaryData BoundaryData::zero(const Grid& grid) {
  return lateral(grid, [](double) { return 0.0; });
}

BoundaryData BoundaryData::scaled(double factor) const {
  BoundaryData b = *this;
  for (auto* vec : {&b.outer, &b.inner, &b.s_min_end, &b.s_max_end})
    for (double& v : *vec) v *= factor;
  return b;
}

bool BoundaryData::is_nonnegative() const {
  for (const auto* vec : {&outer, &inner, &s_min_end, &s_max_end})
    if (std::any_of(vec->begin(), vec->end(), [](double v) { return v < 0.0; })) return false;
  return true;
}

bool BoundaryData::is_identically_zero() const {
  for (const auto* vec : {&outer, &inner})
    if (std::any_of(vec->begin(), vec->end(), [](double v) { return v != 0.0; })) return false;
  return true;
}

double BoundaryData::value(const Grid& grid, int i, int j) const {
  if (i == 0) return s_min_end.empty() ? 0.0 : s_min_end.at(j);
  if (i == grid.n_s() - 1) return s_max_end.empty() ? 0.0 : s_max_end.at(j);
  if (j == grid.n_theta() - 1) return outer.at(i);
  if (j == 0 && !grid.angular().has_axis()) return inner.at(i);
  throw ValidationError("BoundaryData::value called on interior node (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
}

}  // namespace conebif
