#include "conebif/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace conebif::kernels {

double east_coefficient(const Grid& g) {
  const double h = g.h_s();
  return std::exp(0.5 * (g.dimension() - 2) * h) / (h * h);
}

double west_coefficient(const Grid& g) {
  const double h = g.h_s();
  return std::exp(-0.5 * (g.dimension() - 2) * h) / (h * h);
}

double log_u_ab(double alpha, double beta, double s) {
  // log(1 + e^{2s}) without overflow for large s.
  const double l = s > 0 ? 2.0 * s + std::log1p(std::exp(-2.0 * s)) : std::log1p(std::exp(2.0 * s));
  return alpha * s + 0.5 * (beta - alpha) * l;
}

namespace {

inline double pos_pow(double u, double p) { return u > 0.0 ? std::pow(u, p) : 0.0; }

// Interior row of the operator; used by both implementations.
inline void laplacian_row(const Grid& g, double aE, double aW, std::span<const double> u, std::span<double> out,
                          int i) {
  const AngularStencil& ang = g.angular();
  const int nt = g.n_theta();
  const int row = i * nt;
  for (int j = 0; j < nt; ++j) out[row + j] = 0.0;
  for (int j = ang.first_unknown(); j <= ang.last_unknown(); ++j) {
    const int k = row + j;
    const double n = ang.north(j);
    const double sth = ang.south(j);
    double v = aE * (u[k] - u[k + nt]) + aW * (u[k] - u[k - nt]) + n * (u[k] - u[k + 1]);
    if (j > 0) v += sth * (u[k] - u[k - 1]);
    out[k] = v;
  }
}

}  // namespace

namespace serial {

void apply_laplacian(const Grid& g, std::span<const double> u, std::span<double> out) {
  const double aE = east_coefficient(g), aW = west_coefficient(g);
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 1; i < g.n_s() - 1; ++i) laplacian_row(g, aE, aW, u, out, i);
}

void power_source(const Grid& g, std::span<const double> u, double p, double a, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (int k : g.interior_nodes()) {
    const int i = k / g.n_theta();
    out[k] = std::exp((2.0 + a) * g.s(i)) * pos_pow(u[k], p);
  }
}

void power_potential(const Grid& g, std::span<const double> u, double p, double a, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (int k : g.interior_nodes()) {
    const int i = k / g.n_theta();
    out[k] = std::exp((2.0 + a) * g.s(i)) * p * pos_pow(u[k], p - 1.0);
  }
}

double weighted_dot(const Grid& g, std::span<const double> u, std::span<const double> v, double sigma) {
  double sum = 0.0;
  for (int i = 0; i < g.n_s(); ++i)
    for (int j = 0; j < g.n_theta(); ++j) {
      const int k = g.index(i, j);
      sum += g.quad_weight(i, j) * std::exp(sigma * g.s(i)) * u[k] * v[k];
    }
  return sum;
}

double dirichlet_energy(const Grid& g, std::span<const double> u) {
  const AngularStencil& ang = g.angular();
  const int b = g.dimension() - 2;
  const double h = g.h_s();
  double sum = 0.0;
  for (int i = 0; i + 1 < g.n_s(); ++i)
    for (int j = 0; j < g.n_theta(); ++j) {
      const double d = u[g.index(i + 1, j)] - u[g.index(i, j)];
      sum += std::exp(b * (g.s(i) + 0.5 * h)) * ang.mass(j) * d * d / h;
    }
  for (int i = 0; i < g.n_s(); ++i) {
    const double hs = (i == 0 || i == g.n_s() - 1) ? 0.5 * h : h;
    for (int j = 0; j + 1 < g.n_theta(); ++j) {
      const double d = u[g.index(i, j + 1)] - u[g.index(i, j)];
      sum += std::exp(b * g.s(i)) * hs * ang.conductance(j) * d * d;
    }
  }
  return sum;
}

double scaled_sup(const Grid& g, std::span<const double> f, double alpha, double beta) {
  double m = 0.0;
  for (int i = 0; i < g.n_s(); ++i)
    for (int j = 0; j < g.n_theta(); ++j)
      m = std::max(m, std::abs(f[g.index(i, j)]) * std::exp(-log_u_ab(alpha, beta, g.s(i))));
  return m;
}

}  // namespace serial

namespace parallel {

namespace {
template <class RowFn>
double row_sum(int rows, RowFn&& fn) {
  std::vector<double> partial(rows, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i) partial[i] = fn(i);
  double sum = 0.0;
  for (double v : partial) sum += v;
  return sum;
}
}  // namespace

void apply_laplacian(const Grid& g, std::span<const double> u, std::span<double> out) {
  const double aE = east_coefficient(g), aW = west_coefficient(g);
  const int ns = g.n_s(), nt = g.n_theta();
  for (int j = 0; j < nt; ++j) {
    out[j] = 0.0;
    out[(ns - 1) * nt + j] = 0.0;
  }
#pragma omp parallel for schedule(static)
  for (int i = 1; i < ns - 1; ++i) laplacian_row(g, aE, aW, u, out, i);
}

void power_source(const Grid& g, std::span<const double> u, double p, double a, std::span<double> out) {
  const AngularStencil& ang = g.angular();
  const int ns = g.n_s(), nt = g.n_theta();
  const int j0 = ang.first_unknown(), j1 = ang.last_unknown();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < ns; ++i) {
    const bool interior_row = i > 0 && i < ns - 1;
    const double w = std::exp((2.0 + a) * g.s(i));
    for (int j = 0; j < nt; ++j) {
      const int k = i * nt + j;
      out[k] = (interior_row && j >= j0 && j <= j1) ? w * pos_pow(u[k], p) : 0.0;
    }
  }
}

void power_potential(const Grid& g, std::span<const double> u, double p, double a, std::span<double> out) {
  const AngularStencil& ang = g.angular();
  const int ns = g.n_s(), nt = g.n_theta();
  const int j0 = ang.first_unknown(), j1 = ang.last_unknown();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < ns; ++i) {
    const bool interior_row = i > 0 && i < ns - 1;
    const double w = std::exp((2.0 + a) * g.s(i)) * p;
    for (int j = 0; j < nt; ++j) {
      const int k = i * nt + j;
      out[k] = (interior_row && j >= j0 && j <= j1) ? w * pos_pow(u[k], p - 1.0) : 0.0;
    }
  }
}

double weighted_dot(const Grid& g, std::span<const double> u, std::span<const double> v, double sigma) {
  const AngularStencil& ang = g.angular();
  const int ns = g.n_s(), nt = g.n_theta();
  const double h = g.h_s();
  const int N = g.dimension();
  return row_sum(ns, [&](int i) {
    const double hs = (i == 0 || i == ns - 1) ? 0.5 * h : h;
    const double w = std::exp((N + sigma) * g.s(i)) * hs;
    double acc = 0.0;
    for (int j = 0; j < nt; ++j) acc += ang.mass(j) * u[i * nt + j] * v[i * nt + j];
    return w * acc;
  });
}

double dirichlet_energy(const Grid& g, std::span<const double> u) {
  const AngularStencil& ang = g.angular();
  const int ns = g.n_s(), nt = g.n_theta();
  const int b = g.dimension() - 2;
  const double h = g.h_s();
  // Row i collects the s-edges (i, i+1) and the theta-edges of row i.
  return row_sum(ns, [&](int i) {
    double radial = 0.0;
    if (i + 1 < ns) {
      for (int j = 0; j < nt; ++j) {
        const double d = u[(i + 1) * nt + j] - u[i * nt + j];
        radial += ang.mass(j) * d * d;
      }
      radial *= std::exp(b * (g.s(i) + 0.5 * h)) / h;
    }
    double angular = 0.0;
    for (int j = 0; j + 1 < nt; ++j) {
      const double d = u[i * nt + j + 1] - u[i * nt + j];
      angular += ang.conductance(j) * d * d;
    }
    const double hs = (i == 0 || i == ns - 1) ? 0.5 * h : h;
    return radial + std::exp(b * g.s(i)) * hs * angular;
  });
}

double scaled_sup(const Grid& g, std::span<const double> f, double alpha, double beta) {
  const int ns = g.n_s(), nt = g.n_theta();
  std::vector<double> row_max(ns, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < ns; ++i) {
    double m = 0.0;
    for (int j = 0; j < nt; ++j) m = std::max(m, std::abs(f[i * nt + j]));
    row_max[i] = m * std::exp(-log_u_ab(alpha, beta, g.s(i)));
  }
  return *std::max_element(row_max.begin(), row_max.end());
}

}  // namespace parallel

}  // namespace conebif::kernels
