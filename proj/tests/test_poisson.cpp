#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "conebif/barriers.hpp"
#include "conebif/error.hpp"
#include "conebif/exponents.hpp"
#include "conebif/kernels.hpp"
#include "conebif/poisson.hpp"
#include "conebif/verification.hpp"
#include "fixtures.hpp"

using namespace conebif;
using fixtures::cone;
using fixtures::half_space;

namespace {

Field apply(const Field& u) {
  Field out(u.grid);
  kernels::serial::apply_laplacian(*u.grid, u.values, out.values);
  return out;
}

}  // namespace

TEST_CASE("node classification") {
  const GridPtr g3 = make_grid(half_space(), {-1, 1, 11, 9});
  CHECK(g3->kind(0, 3) == NodeKind::radial_end);
  CHECK(g3->kind(10, 3) == NodeKind::radial_end);
  CHECK(g3->kind(5, 8) == NodeKind::lateral);
  CHECK(g3->kind(5, 0) == NodeKind::interior);  // axis
  CHECK(g3->interior_nodes().size() == 9u * 8u);
  const GridPtr g2 = make_grid(half_space(2), {-1, 1, 11, 9});
  CHECK(g2->kind(5, 0) == NodeKind::lateral);
  CHECK(g2->interior_nodes().size() == 9u * 7u);
  CHECK(g2->refined_spec(1).n_s == 21);
  CHECK(g2->refined_spec(2).n_theta == 33);
}

TEST_CASE("constants are annihilated") {
  for (int N : {2, 3, 5}) {
    const GridPtr g = make_grid(cone(N, 1.0), {-2, 2, 21, 11});
    const Field out = apply(Field(g, 3.0));
    for (int k : g->interior_nodes()) CHECK(std::abs(out.values[k]) < 1e-9);
  }
}

TEST_CASE("r^gamma psi is discretely harmonic to second order") {
  // N = 3 half-space: gamma = 1, psi = cos(theta), u = x_N.
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    const int ns = 20 * (1 << level) + 1, nt = 8 * (1 << level) + 1;
    const GridPtr g = make_grid(half_space(), {-1, 1, ns, nt});
    const Field u = Field::sample(g, [](double s, double th) { return std::exp(s) * std::cos(th); });
    const double res = sup_abs_interior(apply(u)) / sup_abs_interior(u);
    if (level > 0) CHECK(std::log2(prev / res) == doctest::Approx(2.0).epsilon(0.08));
    prev = res;
  }
}

TEST_CASE("assembly is deterministic") {
  const GridPtr g = make_grid(half_space(4), {-3, 3, 31, 13});
  const DiscreteOperator a(g), b(g);
  const SparseMatrix d = a.matrix() - b.matrix();
  CHECK(d.norm() == 0.0);
  CHECK(a.unknowns() == static_cast<int>(g->interior_nodes().size()));
}

TEST_CASE("energy is the weighted pairing with the operator") {
  std::mt19937_64 rng(11);
  for (int N : {2, 3, 6}) {
    const GridPtr g = make_grid(cone(N, 1.1), {-2, 2, 41, 15});
    const Field phi = fixtures::random_interior(g, rng);
    const Field Aphi = apply(phi);
    const double pairing = kernels::serial::weighted_dot(*g, Aphi.values, phi.values, -2.0);
    CHECK(dirichlet_energy(phi) == doctest::Approx(pairing).epsilon(1e-12));
    CHECK(dirichlet_energy(phi) > 0.0);
  }
}

TEST_CASE("zero data gives the zero solution") {
  const GridPtr g = make_grid(half_space(), {-2, 2, 21, 9});
  const DiscreteOperator op(g);
  const Field v = solve_poisson(op, Field(g), BoundaryData::zero(*g));
  CHECK(sup_abs(v) == 0.0);
}

TEST_CASE("manufactured solutions converge at second order") {
  for (int N : {2, 3, 4, 6}) {
    CAPTURE(N);
    const double aperture = N == 2 ? 2.0 : 1.2;
    const MmsStudy m = mms_study(cone(N, aperture), {-3, 3, 49, 13}, 3, 0.5, -1.5);
    REQUIRE(m.orders.size() == 2);
    for (double o : m.orders) {
      CHECK(o >= 1.8);
      CHECK(o <= 2.2);
    }
    CHECK(m.levels[2].error < m.levels[0].error);
  }
  // Canonical window values.
  const MmsStudy c = mms_study(half_space(), {-6, 6, 61, 9}, 3, 0.0, -1.5);
  for (double o : c.orders) CHECK(o == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("discrete maximum principle on random nonnegative data") {
  for (int N : {2, 3, 5}) {
    const GridPtr g = make_grid(cone(N, 1.4), {-4, 4, 81, 17});
    const DiscreteOperator op(g);
    CHECK(max_principle_suite(op, 50, 17 + N) >= -1e-10);
  }
  // Every off-diagonal entry of the assembled matrix is nonpositive.
  const DiscreteOperator op(make_grid(half_space(4), {-3, 3, 31, 11}));
  const SparseMatrix& A = op.matrix();
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it)
      if (it.row() != it.col()) CHECK(it.value() <= 0.0);
}

TEST_CASE("green is linear and positivity preserving") {
  std::mt19937_64 rng(23);
  const GridPtr g = make_grid(half_space(), {-3, 3, 61, 17});
  const DiscreteOperator op(g);
  const Field f = fixtures::random_interior(g, rng, true);
  const Field h = fixtures::random_interior(g, rng, false);
  Field sum(g);
  for (std::size_t k = 0; k < sum.values.size(); ++k) sum.values[k] = f.values[k] + 2.5 * h.values[k];
  const Field Gf = green(op, f), Gh = green(op, h), Gs = green(op, sum);
  double err = 0.0;
  for (std::size_t k = 0; k < sum.values.size(); ++k)
    err = std::max(err, std::abs(Gs.values[k] - Gf.values[k] - 2.5 * Gh.values[k]));
  CHECK(err <= 1e-10 * sup_abs(Gs));
  for (double v : Gf.values) CHECK(v >= -1e-12);
}

TEST_CASE("solve_poisson requires its own grid") {
  const GridPtr g = make_grid(half_space(), {-2, 2, 21, 9});
  const GridPtr other = make_grid(half_space(), {-2, 2, 21, 9});
  const DiscreteOperator op(g);
  CHECK_THROWS_AS(solve_poisson(op, Field(other), BoundaryData::zero(*g)), ValidationError);
}

TEST_CASE("scaled extrapolation ends follow the profile ratio") {
  const GridPtr g = make_grid(half_space(), {-3, 3, 31, 9});
  const double al = 0.0, be = -1.5;
  const DiscreteOperator op(g, RadialEndRule::scaled_extrapolation(al, be));
  const Field v = solve_poisson(op, Field(g, 1.0), BoundaryData::lateral(*g, fixtures::gaussian));
  const double rho0 = u_ab(al, be, g->r(0)) / u_ab(al, be, g->r(1));
  const int last = g->n_s() - 1;
  const double rho1 = u_ab(al, be, g->r(last)) / u_ab(al, be, g->r(last - 1));
  for (int j = 0; j + 1 < g->n_theta(); ++j) {
    CHECK(v(0, j) == doctest::Approx(rho0 * v(1, j)).epsilon(1e-12));
    CHECK(v(last, j) == doctest::Approx(rho1 * v(last - 1, j)).epsilon(1e-12));
  }
  const Field d = solve_poisson(DiscreteOperator(g), Field(g, 1.0), BoundaryData::lateral(*g, fixtures::gaussian));
  CHECK(d(0, 3) == 0.0);
}

TEST_CASE("boundary data accessors") {
  const GridPtr g2 = make_grid(half_space(2), {-1, 1, 5, 9});
  const BoundaryData b = BoundaryData::lateral(*g2, [](double s) { return 1.0 + s * s; });
  CHECK(b.inner == b.outer);
  CHECK(b.value(*g2, 2, 0) == doctest::Approx(1.0));
  CHECK(b.value(*g2, 0, 8) == 0.0);  // radial end wins at the corner
  CHECK_THROWS(b.value(*g2, 2, 3));
  CHECK(b.scaled(2.0).outer[1] == doctest::Approx(2.0 * b.outer[1]));
  CHECK(BoundaryData::zero(*g2).is_identically_zero());
  CHECK(b.is_nonnegative());
}

TEST_CASE("quadrature functionals") {
  std::mt19937_64 rng(4);
  const GridPtr g = make_grid(half_space(), {-3, 3, 41, 13});
  const Field z(g);
  CHECK(dirichlet_energy(z) == 0.0);
  CHECK(weighted_l2(z, -2.0) == 0.0);
  const Field u = fixtures::random_interior(g, rng);
  Field cu = u;
  for (double& v : cu.values) v *= 3.0;
  CHECK(weighted_l2(cu, -2.0) == doctest::Approx(9.0 * weighted_l2(u, -2.0)).epsilon(1e-13));
  CHECK(dirichlet_energy(cu) == doctest::Approx(9.0 * dirichlet_energy(u)).epsilon(1e-13));
  // Volume of the truncated half-ball shell: (e^{3 s_max} - e^{3 s_min}) / 3 times the cap measure 1.
  const Field one = Field::sample(g, [](double, double) { return 1.0; });
  CHECK(weighted_l2(one, 0.0) == doctest::Approx((std::exp(9.0) - std::exp(-9.0)) / 3.0).epsilon(2e-2));
}

TEST_CASE("hardy ratios: bumps, homogeneity, random suite, near optimizers") {
  const GridPtr g = make_grid(half_space(), {-6, 6, 241, 33});
  Field bump = Field::sample(g, [](double s, double th) {
    return std::abs(s) < 1.0 ? std::pow(1.0 - s * s, 2) * std::cos(th) : 0.0;
  });
  for (int i = 0; i < g->n_s(); ++i) bump(i, g->n_theta() - 1) = 0.0;
  const double r = hardy_check(bump);
  CHECK(r < 1.0);
  CHECK(r > 0.0);
  Field big = bump;
  for (double& v : big.values) v *= 7.0;
  CHECK(hardy_check(big) == doctest::Approx(r).epsilon(1e-13));

  const HardySuite hs = hardy_suite(g, 50, 12345);
  CHECK(hs.ratios.size() == 50);
  CHECK(hs.max_ratio <= hs.bound);
  for (std::size_t k = 1; k < hs.near_optimizer.size(); ++k) CHECK(hs.near_optimizer[k] > hs.near_optimizer[k - 1]);
  CHECK(hs.near_optimizer.back() > 0.9);
  CHECK(hs.near_optimizer.back() < 1.0);

  CHECK_THROWS_AS(hardy_check(Field(g)), NumericalError);
}
