#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace conebif {

/// A real exponent that may be +infinity (p_S for N = 2, p_JL for N <= 10).
class ExtendedReal {
 public:
  constexpr ExtendedReal(double v) : value_(v), infinite_(false) {}  // NOLINT: implicit by intent
  static constexpr ExtendedReal infinity() { return ExtendedReal(); }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }
  double value() const;
  /// Finite value, or `fallback` when infinite.
  constexpr double value_or(double fallback) const { return infinite_ ? fallback : value_; }

  friend constexpr bool operator<(double x, const ExtendedReal& e) { return e.infinite_ || x < e.value_; }
  friend constexpr bool operator<(const ExtendedReal& e, double x) { return !e.infinite_ && e.value_ < x; }
  friend constexpr bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

 private:
  constexpr ExtendedReal() : value_(0.0), infinite_(true) {}
  double value_;
  bool infinite_;
};

void to_json(nlohmann::json& j, const ExtendedReal& e);

enum class RangeCase { i, ii, iii, iv };
std::string to_string(RangeCase c);

struct OpenInterval {
  double lo;
  ExtendedReal hi;
  bool contains(double x) const { return lo < x && x < hi; }
};

struct ExponentReport {
  int N = 0;
  double lambda = 0.0;
  double a = 0.0;
  double gamma = 0.0;
  double p_star = 0.0;
  bool solvable = true;  // false when p_star <= 1
  ExtendedReal p_S = ExtendedReal::infinity();
  ExtendedReal p_JL = ExtendedReal::infinity();
  // Filled by admissible_range.
  std::vector<double> h_roots;
  RangeCase range_case = RangeCase::iv;
  std::vector<OpenInterval> admissible_intervals;

  bool admits(double p) const;
};

void to_json(nlohmann::json& j, const ExponentReport& r);

/// Unique positive root of gamma (N - 2 + gamma) = lambda.
double gamma_of(int N, double lambda);

double hardy_constant(int N, double lambda);

/// p*_{a,gamma}, p_S and p_JL.
ExponentReport critical_exponents(int N, double lambda, double a);

/// H_a(q) = -4 Lambda q^3 + (N-2)(N-10-4a) q^2 - 4(2+a)(N-4-a) q + 4(2+a)^2.
/// For a = 0 this is H(q) = -4 Lambda q^3 + (N-2)(N-10) q^2 - 8(N-4) q + 16.
double h_poly(double q, int N, double lambda, double a);

/// Roots of H_a(p-1) inside (p_star, p_JL), the sub-intervals where it is
/// negative and the resulting range case. Tangential zeros are not admissible.
ExponentReport admissible_range(int N, double lambda, double a);

/// Left-hand side of the tau feasibility inequality minus one:
/// 1/p + c^{-1} tau^2 - 1 with c the Hardy constant. Negative means feasible.
double tau_quadratic(double p, int N, double lambda, double tau);

/// tau = (2+a)/(p-1) - (N-2)/2, the centre used in the decay estimates.
double tau_center(double p, int N, double a);

struct Interval {
  double lo;
  double hi;
  bool empty() const { return !(lo < hi); }
  bool contains(double x) const { return lo < x && x < hi; }
};

/// Admissible tau: -(N-2)/2 - alpha < tau < -(N-2)/2 - beta intersected with
/// 1/p + tau^2 / c < 1. May be empty.
Interval tau_window(double p, int N, double lambda, double alpha, double beta);

struct DecayWindow {
  double p = 0.0;
  double a = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_star = 0.0;
  double beta_star = 0.0;
  int j_star = 0;
  std::vector<std::pair<double, double>> ladder;  // (alpha_j, beta_j), j = 0..j_star

  /// Ladder value at any j >= 0 (constant past j_star).
  std::pair<double, double> rung(int j) const;
};

void to_json(nlohmann::json& j, const DecayWindow& w);

/// Validates -N+2-gamma < beta < -(2+a)/(p-1) < alpha < gamma (defaults at
/// the midpoints of the two sub-windows) and builds alpha_*, beta_* and the
/// (alpha_j, beta_j) ladder.
DecayWindow decay_window(double p, double gamma, int N, double a, std::optional<double> alpha = std::nullopt,
                         std::optional<double> beta = std::nullopt);

}  // namespace conebif
