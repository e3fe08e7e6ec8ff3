#include "conebif/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "conebif/error.hpp"

namespace conebif {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& known) {
  if (!j.is_object()) throw ValidationError("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ValidationError("config: unknown key '" + where + "." + k + "'");
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ValidationError("config: '" + where + "." + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError("config: '" + where + "." + key + "' must be finite");
  return x;
}

template <class T>
void read(const json& j, const std::string& key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  if constexpr (std::is_same_v<T, int>) {
    if (!j.at(key).is_number_integer()) throw ValidationError("config: '" + where + "." + key + "' must be an integer");
    out = j.at(key).get<int>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.at(key).is_string()) throw ValidationError("config: '" + where + "." + key + "' must be a string");
    out = j.at(key).get<std::string>();
  } else {
    out = get_number(j, key, where);
  }
}

void read_opt(const json& j, const std::string& key, const std::string& where, std::optional<double>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) out.reset();
  else out = get_number(j, key, where);
}

std::vector<std::pair<double, double>> load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open mu table '" + path.string() + "'");
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    double s = 0.0, m = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf", &s, &m) != 2) {
      if (rows.empty()) continue;  // header
      throw ValidationError("config: bad row in mu table: '" + line + "'");
    }
    rows.emplace_back(s, m);
  }
  if (rows.size() < 2) throw ValidationError("config: mu table needs at least two rows");
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (!(rows[k].first > rows[k - 1].first)) throw ValidationError("config: mu table s values must increase");
  return rows;
}

}  // namespace

std::function<double(double)> MuSpec::function() const {
  if (family == "gaussian_bump") {
    const double c = center, w = width, A = amplitude;
    return [=](double s) { return A * std::exp(-0.5 * (s - c) * (s - c) / (w * w)); };
  }
  if (family == "compact_bump") {
    const double lo = s_lo, hi = s_hi, A = amplitude;
    return [=](double s) {
      const double x = (2.0 * s - lo - hi) / (hi - lo);
      return std::abs(x) < 1.0 ? A * std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
    };
  }
  if (family == "table") {
    auto rows = table;
    return [rows](double s) {
      if (s < rows.front().first || s > rows.back().first) return 0.0;
      auto it = std::lower_bound(rows.begin(), rows.end(), s,
                                 [](const std::pair<double, double>& r, double v) { return r.first < v; });
      if (it == rows.begin()) return it->second;
      auto prev = it - 1;
      const double t = (s - prev->first) / (it->first - prev->first);
      return (1.0 - t) * prev->second + t * it->second;
    };
  }
  throw ValidationError("config: unknown mu family '" + family + "'");
}

RunConfig RunConfig::canonical() {
  RunConfig c;
  c.cone.dimension = 3;
  c.cone.aperture = std::numbers::pi / 2.0;
  return c;
}

ProblemSpec RunConfig::problem_spec() const {
  ProblemSpec s;
  s.cone = cone;
  s.p = p;
  s.a = a;
  s.grid = grid;
  s.mu = mu.function();
  s.alpha = alpha;
  s.beta = beta;
  return s;
}

RunConfig RunConfig::refined(int k) const {
  if (k < 0) throw ValidationError("refine must be nonnegative");
  RunConfig c = *this;
  for (int t = 0; t < k; ++t) {
    c.grid.n_s = 2 * (c.grid.n_s - 1) + 1;
    c.grid.n_theta = 2 * (c.grid.n_theta - 1) + 1;
  }
  return c;
}

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  reject_unknown(j, "config",
                 {"cone", "p", "a", "mu", "grid", "window", "kappa", "solver", "bisection", "continuation", "seed",
                  "output_dir"});
  RunConfig c = RunConfig::canonical();
  if (j.contains("cone")) {
    const json& cj = j.at("cone");
    reject_unknown(cj, "cone", {"dimension", "aperture", "lambda"});
    read(cj, "dimension", "cone", c.cone.dimension);
    if (cj.contains("aperture") || cj.contains("lambda")) {
      c.cone.aperture.reset();
      read_opt(cj, "aperture", "cone", c.cone.aperture);
      read_opt(cj, "lambda", "cone", c.cone.lambda_override);
    }
  }
  c.cone.validate();
  read(j, "p", "config", c.p);
  read(j, "a", "config", c.a);
  if (!(c.p > 1.0)) throw ValidationError("config: p must exceed 1");

  if (j.contains("mu")) {
    const json& mj = j.at("mu");
    reject_unknown(mj, "mu", {"family", "center", "width", "amplitude", "s_lo", "s_hi", "path"});
    read(mj, "family", "mu", c.mu.family);
    read(mj, "center", "mu", c.mu.center);
    read(mj, "width", "mu", c.mu.width);
    read(mj, "amplitude", "mu", c.mu.amplitude);
    read(mj, "s_lo", "mu", c.mu.s_lo);
    read(mj, "s_hi", "mu", c.mu.s_hi);
    read(mj, "path", "mu", c.mu.table_path);
  }
  if (c.mu.family == "gaussian_bump" && !(c.mu.width > 0.0)) throw ValidationError("config: mu.width must be positive");
  if (c.mu.family == "compact_bump" && !(c.mu.s_lo < c.mu.s_hi)) throw ValidationError("config: mu.s_lo must be below mu.s_hi");
  if (c.mu.family == "table") {
    if (c.mu.table_path.empty()) throw ValidationError("config: mu.path is required for the table family");
    std::filesystem::path path = c.mu.table_path;
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    c.mu.table = load_table(path);
  } else if (c.mu.family != "gaussian_bump" && c.mu.family != "compact_bump") {
    throw ValidationError("config: unknown mu family '" + c.mu.family + "'");
  }
  if (c.mu.amplitude < 0.0) throw ValidationError("config: mu.amplitude must be nonnegative");

  if (j.contains("grid")) {
    const json& gj = j.at("grid");
    reject_unknown(gj, "grid", {"s_min", "s_max", "n_s", "n_theta"});
    read(gj, "s_min", "grid", c.grid.s_min);
    read(gj, "s_max", "grid", c.grid.s_max);
    read(gj, "n_s", "grid", c.grid.n_s);
    read(gj, "n_theta", "grid", c.grid.n_theta);
  }
  if (!(c.grid.s_min < c.grid.s_max)) throw ValidationError("config: grid.s_min must be below grid.s_max");
  if (c.grid.n_s < 3) throw ValidationError("config: grid.n_s must be at least 3");
  if (c.grid.n_theta < 8) throw ValidationError("config: grid.n_theta must be at least 8");

  if (j.contains("window")) {
    const json& wj = j.at("window");
    reject_unknown(wj, "window", {"alpha", "beta"});
    read_opt(wj, "alpha", "window", c.alpha);
    read_opt(wj, "beta", "window", c.beta);
  }
  read(j, "kappa", "config", c.kappa);
  if (!(c.kappa > 0.0)) throw ValidationError("config: kappa must be positive");

  if (j.contains("solver")) {
    const json& sj = j.at("solver");
    reject_unknown(sj, "solver", {"tol", "max_iter", "blowup_factor", "growth_run"});
    read(sj, "tol", "solver", c.solver.tol);
    read(sj, "max_iter", "solver", c.solver.max_iter);
    read(sj, "blowup_factor", "solver", c.solver.blowup_factor);
    read(sj, "growth_run", "solver", c.solver.growth_run);
  }
  if (!(c.solver.tol > 0.0) || c.solver.max_iter < 1 || !(c.solver.blowup_factor > 1.0) || c.solver.growth_run < 1)
    throw ValidationError("config: solver options out of range");

  if (j.contains("bisection")) {
    const json& bj = j.at("bisection");
    reject_unknown(bj, "bisection", {"kappa_lo", "kappa_hi", "rel_tol", "max_iter"});
    read(bj, "kappa_lo", "bisection", c.bisection.kappa_lo);
    read(bj, "kappa_hi", "bisection", c.bisection.kappa_hi);
    read(bj, "rel_tol", "bisection", c.bisection.rel_tol);
    read(bj, "max_iter", "bisection", c.bisection.max_iter);
  }
  if (!(c.bisection.kappa_lo > 0.0 && c.bisection.kappa_hi > c.bisection.kappa_lo) ||
      !(c.bisection.rel_tol > 0.0) || c.bisection.max_iter < 1)
    throw ValidationError("config: bisection options out of range");

  if (j.contains("continuation")) {
    const json& kj = j.at("continuation");
    reject_unknown(kj, "continuation", {"kappa_start", "ds", "max_steps", "kappa_floor", "sup_factor"});
    read(kj, "kappa_start", "continuation", c.branch_kappa_start);
    read(kj, "ds", "continuation", c.continuation.ds);
    read(kj, "max_steps", "continuation", c.continuation.max_steps);
    read(kj, "kappa_floor", "continuation", c.continuation.kappa_floor);
    read(kj, "sup_factor", "continuation", c.continuation.sup_factor);
  }
  if (!(c.branch_kappa_start > 0.0) || !(c.continuation.ds > 0.0) || c.continuation.max_steps < 3)
    throw ValidationError("config: continuation options out of range");

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ValidationError("config: seed must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  read(j, "output_dir", "config", c.output_dir);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_config(j, path.parent_path());
}

nlohmann::json to_json(const RunConfig& c) {
  json cone = {{"dimension", c.cone.dimension}};
  cone["aperture"] = c.cone.aperture ? json(*c.cone.aperture) : json(nullptr);
  cone["lambda"] = c.cone.lambda_override ? json(*c.cone.lambda_override) : json(nullptr);
  json mu = {{"family", c.mu.family}};
  if (c.mu.family == "gaussian_bump") {
    mu["center"] = c.mu.center;
    mu["width"] = c.mu.width;
    mu["amplitude"] = c.mu.amplitude;
  } else if (c.mu.family == "compact_bump") {
    mu["s_lo"] = c.mu.s_lo;
    mu["s_hi"] = c.mu.s_hi;
    mu["amplitude"] = c.mu.amplitude;
  } else {
    mu["path"] = c.mu.table_path;
  }
  json window = {{"alpha", c.alpha ? json(*c.alpha) : json(nullptr)}, {"beta", c.beta ? json(*c.beta) : json(nullptr)}};
  return {{"cone", cone},
          {"p", c.p},
          {"a", c.a},
          {"mu", mu},
          {"grid", {{"s_min", c.grid.s_min}, {"s_max", c.grid.s_max}, {"n_s", c.grid.n_s}, {"n_theta", c.grid.n_theta}}},
          {"window", window},
          {"kappa", c.kappa},
          {"solver",
           {{"tol", c.solver.tol},
            {"max_iter", c.solver.max_iter},
            {"blowup_factor", c.solver.blowup_factor},
            {"growth_run", c.solver.growth_run}}},
          {"bisection",
           {{"kappa_lo", c.bisection.kappa_lo},
            {"kappa_hi", c.bisection.kappa_hi},
            {"rel_tol", c.bisection.rel_tol},
            {"max_iter", c.bisection.max_iter}}},
          {"continuation",
           {{"kappa_start", c.branch_kappa_start},
            {"ds", c.continuation.ds},
            {"max_steps", c.continuation.max_steps},
            {"kappa_floor", c.continuation.kappa_floor},
            {"sup_factor", c.continuation.sup_factor}}},
          {"seed", c.seed},
          {"output_dir", c.output_dir}};
}

std::string config_hash(const RunConfig& c) {
  json j = to_json(c);
  j.erase("output_dir");
  if (c.mu.family == "table") j["mu"]["rows"] = c.mu.table;  // contents, not just the file name
  const std::string dump = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace conebif
