#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <omp.h>

#include "conebif/barriers.hpp"
#include "conebif/kernels.hpp"
#include "fixtures.hpp"

using namespace conebif;

namespace {

struct Sample {
  GridPtr grid;
  std::vector<double> u, v;
};

Sample sample(int N, std::uint64_t seed) {
  Sample s;
  s.grid = make_grid(fixtures::cone(N, 1.3), {-5, 5, 121, 29});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-0.3, 1.0);
  s.u.resize(s.grid->size());
  s.v.resize(s.grid->size());
  for (double& x : s.u) x = d(rng);
  for (double& x : s.v) x = d(rng);
  return s;
}

}  // namespace

TEST_CASE("parallel kernels reproduce the serial reference") {
  for (int N : {2, 3, 7}) {
    CAPTURE(N);
    const Sample s = sample(N, 100 + N);
    const Grid& g = *s.grid;
    std::vector<double> a(g.size()), b(g.size());

    kernels::serial::apply_laplacian(g, s.u, a);
    kernels::parallel::apply_laplacian(g, s.u, b);
    CHECK(a == b);

    kernels::serial::power_source(g, s.u, 3.0, 1.0, a);
    kernels::parallel::power_source(g, s.u, 3.0, 1.0, b);
    CHECK(a == b);

    kernels::serial::power_potential(g, s.u, 2.5, 0.0, a);
    kernels::parallel::power_potential(g, s.u, 2.5, 0.0, b);
    CHECK(a == b);

    CHECK(kernels::parallel::weighted_dot(g, s.u, s.v, -2.0) ==
          doctest::Approx(kernels::serial::weighted_dot(g, s.u, s.v, -2.0)).epsilon(1e-13));
    CHECK(kernels::parallel::dirichlet_energy(g, s.u) ==
          doctest::Approx(kernels::serial::dirichlet_energy(g, s.u)).epsilon(1e-13));
    CHECK(kernels::parallel::scaled_sup(g, s.u, 0.0, -1.5) == kernels::serial::scaled_sup(g, s.u, 0.0, -1.5));
  }
}

TEST_CASE("parallel reductions do not depend on the thread count") {
  const Sample s = sample(3, 9);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double d1 = kernels::parallel::weighted_dot(*s.grid, s.u, s.v, 0.5);
  const double e1 = kernels::parallel::dirichlet_energy(*s.grid, s.u);
  omp_set_num_threads(4);
  const double d4 = kernels::parallel::weighted_dot(*s.grid, s.u, s.v, 0.5);
  const double e4 = kernels::parallel::dirichlet_energy(*s.grid, s.u);
  omp_set_num_threads(saved);
  CHECK(d1 == d4);
  CHECK(e1 == e4);
}

TEST_CASE("pointwise kernels") {
  const Sample s = sample(3, 1);
  const Grid& g = *s.grid;
  std::vector<double> out(g.size());
  kernels::serial::power_source(g, s.u, 3.0, 1.0, out);
  for (int i = 0; i < g.n_s(); ++i)
    for (int j = 0; j < g.n_theta(); ++j) {
      const int k = g.index(i, j);
      const double up = std::max(s.u[k], 0.0);
      const double expect = g.is_interior(i, j) ? std::exp(3.0 * g.s(i)) * up * up * up : 0.0;
      CHECK(out[k] == doctest::Approx(expect).epsilon(1e-14));
    }
  CHECK(kernels::east_coefficient(g) * kernels::west_coefficient(g) ==
        doctest::Approx(1.0 / std::pow(g.h_s(), 4)).epsilon(1e-14));
}

TEST_CASE("log_u_ab matches the direct formula and stays finite") {
  for (double s : {-30.0, -2.0, 0.0, 1.5, 40.0}) {
    const double direct = 0.7 * s + (-2.3 - 0.7) / 2.0 * std::log1p(std::exp(2.0 * s));
    CHECK(kernels::log_u_ab(0.7, -2.3, s) == doctest::Approx(direct).epsilon(1e-12));
  }
  CHECK(std::isfinite(kernels::log_u_ab(1.0, -3.0, 800.0)));
  CHECK(std::exp(kernels::log_u_ab(0.3, 0.3, 1.2)) == doctest::Approx(u_ab(0.3, 0.3, std::exp(1.2))));
}
