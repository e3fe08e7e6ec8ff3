#include "conebif/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>

#include "conebif/error.hpp"
#include "conebif/kernels.hpp"

namespace conebif {

namespace {

constexpr double kPi = std::numbers::pi;

struct Angular {
  double value;
  double minus_laplacian;  // -Delta' applied to the angular factor
};

Angular mms_angular(int N, double theta0, double theta) {
  if (N == 2) {
    const double k = kPi / theta0;
    return {std::sin(k * theta), k * k * std::sin(k * theta)};
  }
  const double k = 0.5 * kPi / theta0;
  // -(1/w)(w T')' = -T'' - (N-2) cot(theta) T' with T = cos(k theta)
  const double cot_term = theta < 1e-12 ? k : std::sin(k * theta) / std::tan(theta);
  return {std::cos(k * theta), k * k * std::cos(k * theta) + (N - 2) * k * cot_term};
}

}  // namespace

Field mms_exact(const GridPtr& grid, double alpha, double beta) {
  const int N = grid->dimension();
  const double theta0 = grid->angular().aperture();
  return Field::sample(grid, [=](double s, double th) {
    return std::exp(kernels::log_u_ab(alpha, beta, s)) * (mms_angular(N, theta0, th).value + 0.5);
  });
}

Field mms_source(const GridPtr& grid, double alpha, double beta) {
  const int N = grid->dimension();
  const double theta0 = grid->angular().aperture();
  return Field::sample(grid, [=](double s, double th) {
    const double t = 1.0 / (1.0 + std::exp(-2.0 * s));
    const double d1 = alpha + (beta - alpha) * t;               // g'/g
    const double d2 = d1 * d1 + 2.0 * (beta - alpha) * t * (1.0 - t);  // g''/g
    const Angular a = mms_angular(N, theta0, th);
    const double g = std::exp(kernels::log_u_ab(alpha, beta, s));
    return std::exp(-2.0 * s) * g * (-(d2 + (N - 2) * d1) * (a.value + 0.5) + a.minus_laplacian);
  });
}

BoundaryData mms_boundary(const Grid& grid, double alpha, double beta) {
  const int N = grid.dimension();
  const double theta0 = grid.angular().aperture();
  auto exact = [&](double s, double th) {
    return std::exp(kernels::log_u_ab(alpha, beta, s)) * (mms_angular(N, theta0, th).value + 0.5);
  };
  BoundaryData bc;
  bc.outer.resize(grid.n_s());
  for (int i = 0; i < grid.n_s(); ++i) bc.outer[i] = exact(grid.s(i), theta0);
  if (!grid.angular().has_axis()) {
    bc.inner.resize(grid.n_s());
    for (int i = 0; i < grid.n_s(); ++i) bc.inner[i] = exact(grid.s(i), 0.0);
  }
  bc.s_min_end.resize(grid.n_theta());
  bc.s_max_end.resize(grid.n_theta());
  for (int j = 0; j < grid.n_theta(); ++j) {
    bc.s_min_end[j] = exact(grid.s(0), grid.theta(j));
    bc.s_max_end[j] = exact(grid.s(grid.n_s() - 1), grid.theta(j));
  }
  return bc;
}

void to_json(nlohmann::json& j, const MmsStudy& m) {
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : m.levels)
    lv.push_back({{"n_s", l.n_s}, {"n_theta", l.n_theta}, {"h", l.h}, {"error", l.error}});
  j = {{"levels", lv}, {"orders", m.orders}};
}

MmsStudy mms_study(const ConeSpec& cone, const GridSpec& base, int levels, double alpha, double beta) {
  if (levels < 2) throw ValidationError("mms_study: need at least two levels");
  MmsStudy out;
  GridSpec gs = base;
  for (int l = 0; l < levels; ++l) {
    GridPtr g = make_grid(cone, gs);
    DiscreteOperator op(g);
    const Field v = solve_poisson(op, mms_source(g, alpha, beta), mms_boundary(*g, alpha, beta));
    const Field ex = mms_exact(g, alpha, beta);
    double err = 0.0;
    for (int k : g->interior_nodes()) err = std::max(err, std::abs(v.values[k] - ex.values[k]));
    out.levels.push_back({gs.n_s, gs.n_theta, g->max_spacing(), err});
    gs = g->refined_spec(1);
  }
  for (std::size_t l = 1; l < out.levels.size(); ++l)
    out.orders.push_back(std::log2(out.levels[l - 1].error / out.levels[l].error));
  return out;
}

double max_principle_suite(const DiscreteOperator& op, int count, std::uint64_t seed) {
  const Grid& g = op.grid();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int c = 0; c < count; ++c) {
    // Random magnitudes spread over several decades, some entries exactly zero.
    const double fs = std::pow(10.0, 4.0 * unit(rng) - 2.0);
    Field f(op.grid_ptr());
    for (double& v : f.values) v = unit(rng) < 0.2 ? 0.0 : fs * unit(rng);
    BoundaryData bc = BoundaryData::zero(g);
    for (double& v : bc.outer) v = unit(rng) < 0.2 ? 0.0 : unit(rng);
    for (double& v : bc.inner) v = unit(rng);
    const Field v = solve_poisson(op, f, bc);
    for (int k : g.interior_nodes()) worst = std::min(worst, v.values[k]);
  }
  return worst;
}

void to_json(nlohmann::json& j, const HardySuite& h) {
  j = {{"bound", h.bound}, {"max_ratio", h.max_ratio}, {"ratios", h.ratios}, {"near_optimizer", h.near_optimizer}};
}

HardySuite hardy_suite(const GridPtr& grid, int count, std::uint64_t seed) {
  const Grid& g = *grid;
  const int N = g.dimension();
  const double theta0 = g.angular().aperture();
  const double lambda = cone_lambda(g.cone());
  const double b = 0.5 * (N - 2);
  const double s0 = g.s(0), L = g.s(g.n_s() - 1) - s0;
  HardySuite out;
  out.bound = 1.0 + 5.0 * g.max_spacing();

  auto theta_mode = [&](int l, double th) {
    return N == 2 ? std::sin(l * kPi * th / theta0) : std::cos((2 * l - 1) * 0.5 * kPi * th / theta0);
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < count; ++c) {
    const double rho = -b + (unit(rng) - 0.5);
    const int K = 1 + static_cast<int>(4 * unit(rng));
    const int M = 1 + static_cast<int>(3 * unit(rng));
    std::vector<double> coef(K * M);
    for (double& v : coef) v = 2.0 * unit(rng) - 1.0;
    coef[0] += 2.0;  // keep the lowest mode dominant in most samples
    Field phi = Field::sample(grid, [&](double s, double th) {
      double acc = 0.0;
      for (int k = 1; k <= K; ++k)
        for (int l = 1; l <= M; ++l) acc += coef[(k - 1) * M + (l - 1)] * std::sin(k * kPi * (s - s0) / L) * theta_mode(l, th);
      return std::exp(rho * s) * acc;
    });
    for (int i = 0; i < g.n_s(); ++i)
      for (int j = 0; j < g.n_theta(); ++j)
        if (!g.is_interior(i, j)) phi(i, j) = 0.0;
    const double r = hardy_check(phi, lambda);
    out.ratios.push_back(r);
    out.max_ratio = std::max(out.max_ratio, r);
  }

  const CrossSectionEigen eig = cross_section_eigen(g.cone(), g.n_theta());
  const std::vector<double>& psi = eig.psi->values;
  const double mid = s0 + 0.5 * L;
  for (double frac : {0.2, 0.4, 0.6, 0.8, 0.95}) {
    const double half = 0.5 * frac * L;  // support [mid - half, mid + half]
    const double ramp = std::min(1.5, 0.5 * half);
    Field phi = Field::sample(grid, [&](double s, double) {
      const double d = half - std::abs(s - mid);  // distance to the support edge
      if (d <= 0.0) return 0.0;
      const double eta = d >= ramp ? 1.0 : std::pow(std::sin(0.5 * kPi * d / ramp), 2);
      return std::exp(-b * s) * eta;
    });
    for (int i = 0; i < g.n_s(); ++i)
      for (int j = 0; j < g.n_theta(); ++j) phi(i, j) = g.is_interior(i, j) ? phi(i, j) * psi[j] : 0.0;
    out.near_optimizer.push_back(hardy_check(phi, lambda));
  }
  return out;
}

void to_json(nlohmann::json& j, const BarrierCheck& b) {
  j = {{"certificate", b.certificate},
       {"small_kappa", b.small},
       {"status", to_string(b.outcome.status)},
       {"iterations", b.outcome.j_reached},
       {"max_excess", b.max_excess},
       {"passed", b.passed}};
}

BarrierCheck barrier_check(const Problem& pr, const SolverOptions& opts) {
  BarrierCheck out;
  out.certificate = build_barrier(pr.spec().cone, pr.window().alpha, pr.window().beta, pr.grid_ptr());
  if (!out.certificate.valid) return out;
  out.small = small_kappa_certificate(out.certificate, pr.p(), pr.a(), pr.boundary());
  out.outcome = minimal_solution(pr, out.small.kappa0, opts);
  double sup_dv = 0.0;
  out.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < out.certificate.V.values.size(); ++k) {
    const double dv = out.small.delta * out.certificate.V.values[k];
    sup_dv = std::max(sup_dv, dv);
    out.max_excess = std::max(out.max_excess, out.outcome.last.values[k] - dv);
  }
  out.max_excess /= sup_dv;
  out.passed = out.outcome.converged() && out.max_excess <= 1e-12;
  return out;
}

}  // namespace conebif
