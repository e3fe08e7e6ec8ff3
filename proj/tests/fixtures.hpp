#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "conebif/grid.hpp"
#include "conebif/solver.hpp"

namespace fixtures {

inline conebif::ConeSpec cone(int N, double aperture) {
  conebif::ConeSpec c;
  c.dimension = N;
  c.aperture = aperture;
  return c;
}

inline conebif::ConeSpec half_space(int N = 3) { return cone(N, std::numbers::pi / 2.0); }

inline double gaussian(double s) { return std::exp(-0.5 * s * s / 0.25); }

/// Half-space problem on a coarse window, small enough for unit tests.
inline conebif::ProblemSpec small_spec(double a = 0.0, double p = 3.0) {
  conebif::ProblemSpec s;
  s.cone = half_space();
  s.p = p;
  s.a = a;
  s.grid = {-4.0, 4.0, 81, 17};
  s.mu = gaussian;
  s.alpha = 0.0;
  s.beta = a == 0.0 ? -1.5 : -1.75;
  return s;
}

/// Random field vanishing at every non-interior node.
inline conebif::Field random_interior(const conebif::GridPtr& g, std::mt19937_64& rng, bool positive = false) {
  std::uniform_real_distribution<double> d(positive ? 0.0 : -1.0, 1.0);
  conebif::Field f(g);
  for (int k : g->interior_nodes()) f.values[k] = d(rng);
  return f;
}

}  // namespace fixtures
