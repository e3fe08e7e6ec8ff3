#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "conebif/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void print_error(const std::string& kind, const std::string& message, int code) {
  json e = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  std::cerr << e.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-Emden type problems on cones: exponents, minimal branch, fold and upper branch"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int refine = 0;
  app.add_option("--config", config_path, "JSON run configuration (defaults to the half-space setup)");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("--refine", refine, "halve both grid spacings k times")->check(CLI::NonNegativeNumber);

  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const conebif::cli::Context&);
  };
  const Entry entries[] = {
      {"exponents", "critical exponents and admissible p range", conebif::cli::cmd_exponents},
      {"eigen-cap", "first Dirichlet eigenpair of the cross section", conebif::cli::cmd_eigen_cap},
      {"solve", "minimal solution at the configured kappa", conebif::cli::cmd_solve},
      {"kappa-star", "bisection bracket for the extremal kappa", conebif::cli::cmd_kappa_star},
      {"branch", "pseudo-arclength continuation through the fold", conebif::cli::cmd_branch},
      {"verify", "barrier certificate, manufactured solutions, maximum principle and Hardy suites",
       conebif::cli::cmd_verify},
  };
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    // Global flags are also accepted after the subcommand name.
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  try {
    conebif::cli::Context ctx = conebif::cli::make_context(config_path, out_dir, refine);
    for (const Entry& e : entries)
      if (app.got_subcommand(e.name)) return e.run(ctx);
  } catch (const conebif::ValidationError& e) {
    print_error("validation", e.what(), 2);
    return 2;
  } catch (const conebif::NumericalError& e) {
    print_error("numerical", e.what(), 3);
    return 3;
  } catch (const std::exception& e) {
    print_error("io", e.what(), 3);
    return 3;
  }
  return 2;
}
