#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conebif/continuation.hpp"
#include "conebif/solver.hpp"

namespace conebif {

/// Boundary datum family, all functions of s = log r.
struct MuSpec {
  std::string family = "gaussian_bump";  // gaussian_bump | compact_bump | table
  double center = 0.0;                   // gaussian_bump
  double width = 0.5;
  double amplitude = 1.0;                // gaussian_bump, compact_bump
  double s_lo = -1.0;                    // compact_bump
  double s_hi = 1.0;
  std::string table_path;                // table: CSV rows "s,mu", linear interpolation, 0 outside
  std::vector<std::pair<double, double>> table;  // loaded rows

  std::function<double(double)> function() const;
};

struct BisectionConfig {
  double kappa_lo = 1.0;
  double kappa_hi = 2.0;
  double rel_tol = 1e-4;
  int max_iter = 20000;  // Picard cap per probe; probes near the fold converge slowly
};

struct RunConfig {
  ConeSpec cone;
  double p = 3.0;
  double a = 0.0;
  MuSpec mu;
  GridSpec grid;
  std::optional<double> alpha = 0.0;
  std::optional<double> beta = -1.5;
  double kappa = 1.0;  // for solve
  SolverOptions solver;
  BisectionConfig bisection;
  double branch_kappa_start = 0.5;
  ContinuationOptions continuation;
  std::uint64_t seed = 12345;
  std::string output_dir = "out";

  /// The shipped half-space configuration.
  static RunConfig canonical();

  ProblemSpec problem_spec() const;
  /// Grid spacings halved `k` times.
  RunConfig refined(int k) const;
};

/// Parses and validates; unknown keys are rejected. Relative table paths are
/// resolved against `base_dir`.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

/// FNV-1a 64 of the canonical JSON dump (output_dir excluded), as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace conebif
