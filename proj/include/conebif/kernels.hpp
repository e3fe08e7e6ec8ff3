#pragma once

#include <span>

#include "conebif/grid.hpp"

// Inner loops shared by the solvers. `parallel` is what the library calls;
// `serial` is a plain reference implementation kept for tests and benchmarks.
// All vectors are full-grid node arrays in Grid storage order.
//
// Sums in `parallel` are formed per radial row and then added in row order,
// so results do not depend on the thread count.
namespace conebif::kernels {

// The operator rows below are e^{2s} (-Delta_h u) at interior nodes:
//   a_E (u - u_E) + a_W (u - u_W) + north_j (u - u_N) + south_j (u - u_S)
// with a_{E,W} = e^{+-(N-2) h_s / 2} / h_s^2.
double east_coefficient(const Grid& g);
double west_coefficient(const Grid& g);

namespace serial {
/// out = e^{2s}(-Delta_h u) at interior nodes, 0 elsewhere. Boundary entries of u are used as data.
void apply_laplacian(const Grid& g, std::span<const double> u, std::span<double> out);
/// out = e^{(2+a)s} max(u,0)^p at interior nodes, 0 elsewhere.
void power_source(const Grid& g, std::span<const double> u, double p, double a, std::span<double> out);
/// out = e^{(2+a)s} p max(u,0)^{p-1} at interior nodes, 0 elsewhere.
void power_potential(const Grid& g, std::span<const double> u, double p, double a, std::span<double> out);
/// sum over nodes of quad_weight * e^{sigma s} * u * v.
double weighted_dot(const Grid& g, std::span<const double> u, std::span<const double> v, double sigma);
/// Edge form of the Dirichlet integral.
double dirichlet_energy(const Grid& g, std::span<const double> u);
/// max over nodes of |f| / U_{alpha,beta}(r).
double scaled_sup(const Grid& g, std::span<const double> f, double alpha, double beta);
}  // namespace serial

namespace parallel {
void apply_laplacian(const Grid& g, std::span<const double> u, std::span<double> out);
void power_source(const Grid& g, std::span<const double> u, double p, double a, std::span<double> out);
void power_potential(const Grid& g, std::span<const double> u, double p, double a, std::span<double> out);
double weighted_dot(const Grid& g, std::span<const double> u, std::span<const double> v, double sigma);
double dirichlet_energy(const Grid& g, std::span<const double> u);
double scaled_sup(const Grid& g, std::span<const double> f, double alpha, double beta);
}  // namespace parallel

/// log U_{alpha,beta}(e^s), overflow-safe.
double log_u_ab(double alpha, double beta, double s);

}  // namespace conebif::kernels
