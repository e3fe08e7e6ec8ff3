#pragma once

#include <filesystem>
#include <string>

#include "conebif/config.hpp"

// Subcommand pipelines. Each returns the process exit code and writes its
// files under ctx.out; errors propagate as ValidationError / NumericalError.
namespace conebif::cli {

struct Context {
  RunConfig config;
  std::filesystem::path out;
  std::string hash;
  int refine = 0;
};

/// Loads the config (canonical when `config_path` is empty), applies
/// --refine and --out, and computes the hash of the effective config.
Context make_context(const std::string& config_path, const std::string& out_dir, int refine);

int cmd_exponents(const Context& ctx);
int cmd_eigen_cap(const Context& ctx);
int cmd_solve(const Context& ctx);
int cmd_kappa_star(const Context& ctx);
int cmd_branch(const Context& ctx);
int cmd_verify(const Context& ctx);

}  // namespace conebif::cli
