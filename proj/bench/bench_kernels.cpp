// Serial reference kernels against their OpenMP counterparts.
// Range argument: number of radial nodes (the angular count is n_s / 8 + 1).

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "conebif/kernels.hpp"

using namespace conebif;

namespace {

struct Data {
  GridPtr grid;
  std::vector<double> u, v, out;
};

Data make(int n_s) {
  ConeSpec cone;
  cone.dimension = 3;
  cone.aperture = 1.5707963267948966;
  Data d;
  d.grid = make_grid(cone, {-6.0, 6.0, n_s, n_s / 8 + 1});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  d.u.resize(d.grid->size());
  d.v.resize(d.grid->size());
  d.out.resize(d.grid->size());
  for (double& x : d.u) x = dist(rng);
  for (double& x : d.v) x = dist(rng);
  return d;
}

template <void (*Fn)(const Grid&, std::span<const double>, std::span<double>)>
void laplacian(benchmark::State& st) {
  Data d = make(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    Fn(*d.grid, d.u, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  st.SetItemsProcessed(st.iterations() * d.grid->size());
}

template <void (*Fn)(const Grid&, std::span<const double>, double, double, std::span<double>)>
void source(benchmark::State& st) {
  Data d = make(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    Fn(*d.grid, d.u, 3.0, 1.0, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  st.SetItemsProcessed(st.iterations() * d.grid->size());
}

template <double (*Fn)(const Grid&, std::span<const double>, std::span<const double>, double)>
void dot(benchmark::State& st) {
  Data d = make(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(*d.grid, d.u, d.v, -2.0));
  st.SetItemsProcessed(st.iterations() * d.grid->size());
}

template <double (*Fn)(const Grid&, std::span<const double>)>
void energy(benchmark::State& st) {
  Data d = make(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(*d.grid, d.u));
  st.SetItemsProcessed(st.iterations() * d.grid->size());
}

}  // namespace

#define SIZES Arg(241)->Arg(481)->Arg(961)->Arg(1921)

BENCHMARK(laplacian<kernels::serial::apply_laplacian>)->Name("laplacian/serial")->SIZES;
BENCHMARK(laplacian<kernels::parallel::apply_laplacian>)->Name("laplacian/parallel")->SIZES->UseRealTime();
BENCHMARK(source<kernels::serial::power_source>)->Name("power_source/serial")->SIZES;
BENCHMARK(source<kernels::parallel::power_source>)->Name("power_source/parallel")->SIZES->UseRealTime();
BENCHMARK(dot<kernels::serial::weighted_dot>)->Name("weighted_dot/serial")->SIZES;
BENCHMARK(dot<kernels::parallel::weighted_dot>)->Name("weighted_dot/parallel")->SIZES->UseRealTime();
BENCHMARK(energy<kernels::serial::dirichlet_energy>)->Name("dirichlet_energy/serial")->SIZES;
BENCHMARK(energy<kernels::parallel::dirichlet_energy>)->Name("dirichlet_energy/parallel")->SIZES->UseRealTime();

BENCHMARK_MAIN();
