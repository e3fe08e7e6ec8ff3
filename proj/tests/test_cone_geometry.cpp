#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conebif/cone_geometry.hpp"
#include "conebif/error.hpp"
#include "fixtures.hpp"

using namespace conebif;
using fixtures::cone;
using fixtures::half_space;

TEST_CASE("half-space cap eigenvalue tends to N-1 at second order") {
  for (int N : {3, 4, 7}) {
    CAPTURE(N);
    const double e1 = std::abs(cross_section_eigen(half_space(N), 33).lambda - (N - 1));
    const double e2 = std::abs(cross_section_eigen(half_space(N), 65).lambda - (N - 1));
    const double e3 = std::abs(cross_section_eigen(half_space(N), 129).lambda - (N - 1));
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("planar sector eigenvalue is (pi/theta0)^2") {
  CHECK(richardson_lambda(half_space(2), 65) == doctest::Approx(4.0).epsilon(1e-7));
  CHECK(richardson_lambda(cone(2, 1.0), 65) == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-7));
  CHECK(cone_lambda(half_space(2)) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("lambda override bypasses the eigensolve") {
  ConeSpec c;
  c.dimension = 5;
  c.lambda_override = 7.5;
  const CrossSectionEigen e = cross_section_eigen(c, 33);
  CHECK(e.lambda == 7.5);
  CHECK_FALSE(e.psi.has_value());
  CHECK(cone_lambda(c) == 7.5);
  CHECK_THROWS_AS(tilde_phi(c, 0.0, 33), ValidationError);
}

TEST_CASE("eigenfunction is positive inside and max-normalized") {
  for (int N : {2, 3, 6}) {
    CAPTURE(N);
    const CrossSectionEigen e = cross_section_eigen(cone(N, 1.1), 41);
    REQUIRE(e.psi);
    const auto& v = e.psi->values;
    CHECK(*std::max_element(v.begin(), v.end()) == doctest::Approx(1.0));
    for (std::size_t j = 1; j + 1 < v.size(); ++j) CHECK(v[j] > 0.0);
    CHECK(v.back() == 0.0);
    if (N >= 3) CHECK(v.front() > 0.0);  // axis node is an unknown
  }
}

TEST_CASE("cone spec validation") {
  CHECK_THROWS_AS(cone(1, 1.0).validate(), ValidationError);
  CHECK_THROWS_AS(cone(3, 3.5).validate(), ValidationError);
  CHECK_THROWS_AS(cone(3, 0.0).validate(), ValidationError);
  CHECK_NOTHROW(cone(3, std::numbers::pi).validate());
  CHECK_THROWS_AS(cone(2, 2.0 * std::numbers::pi).validate(), ValidationError);
  CHECK_NOTHROW(cone(2, 6.0).validate());
  ConeSpec bad;
  bad.dimension = 3;
  bad.lambda_override = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(cross_section_eigen(half_space(), 7), ValidationError);
}

TEST_CASE("tilde_phi with M = 0 on a sector is the exact parabola") {
  const double t0 = 1.3;
  const AngularProfile prof = tilde_phi(cone(2, t0), 0.0, 27);
  for (std::size_t j = 0; j < prof.theta.size(); ++j) {
    const double th = prof.theta[j];
    CHECK(prof.values[j] == doctest::Approx(1.0 + th * (t0 - th) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("tilde_phi is at least one exactly when M >= -1") {
  // phi - 1 solves the same problem with source 1 + M and zero boundary data.
  for (int N : {2, 3, 5}) {
    CAPTURE(N);
    const int n = 33;
    const ConeSpec c = cone(N, 1.2);
    const double h = 1.2 / (n - 1);
    for (double M : {-1.0, -0.5, 0.0, 0.5, 1.5}) {
      CAPTURE(M);
      if (M >= cross_section_eigen(c, n).lambda) continue;
      const AngularProfile prof = tilde_phi(c, M, n);
      CHECK(*std::min_element(prof.values.begin(), prof.values.end()) >= 1.0 - 10.0 * h * h);
    }
    for (double v : tilde_phi(c, -1.0, n).values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    const AngularProfile below = tilde_phi(c, -3.0, n);
    CHECK(*std::min_element(below.values.begin(), below.values.end()) < 1.0 - 0.1);
    // As M -> -infinity the interior values behave like 1/|M|.
    const AngularProfile far = tilde_phi(c, -1e8, n);
    const AngularStencil st(N, 1.2, n);
    for (int j = 0; j < n; ++j) {
      if (st.is_boundary(j)) CHECK(far.values[j] == 1.0);
      else if (j >= st.first_unknown() + 1 && j + 1 < st.last_unknown()) CHECK(far.values[j] == doctest::Approx(1e-8).epsilon(1e-6));
    }
  }
}

TEST_CASE("tilde_phi rejects M at or above the first eigenvalue") {
  const ConeSpec c = half_space();
  const double lam = cross_section_eigen(c, 33).lambda;
  CHECK_THROWS_AS(tilde_phi(c, lam, 33), ValidationError);
  CHECK_THROWS_AS(tilde_phi(c, lam + 1.0, 33), ValidationError);
}

TEST_CASE("angular stencil is exact on quadratics at the axis") {
  // -Delta' theta^2 -> -2(N-1) at theta = 0 in the small-angle limit; the
  // control-volume masses make rows next to the axis consistent for every N.
  for (int N : {3, 4, 6, 9}) {
    CAPTURE(N);
    const AngularStencil st(N, 1.0, 401);
    auto u = [&](int j) { return st.nodes()[j] * st.nodes()[j]; };
    const double r1 = st.north(1) * (u(1) - u(2)) + st.south(1) * (u(1) - u(0));
    const double th = st.nodes()[1];
    const double exact = -2.0 - 2.0 * (N - 2) * th * std::cos(th) / std::sin(th);
    CHECK(r1 == doctest::Approx(exact).epsilon(1e-3));
    const double r0 = st.north(0) * (u(0) - u(1));
    CHECK(r0 == doctest::Approx(-2.0 * (N - 1)).epsilon(1e-3));
  }
}
