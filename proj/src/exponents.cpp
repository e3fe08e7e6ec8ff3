#include "conebif/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conebif/error.hpp"

namespace conebif {

namespace {

constexpr double kRootTol = 1e-10;
constexpr int kPrescanPoints = 10000;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

struct Cubic {
  double c3, c2, c1, c0;
  double operator()(double q) const { return ((c3 * q + c2) * q + c1) * q + c0; }
};

Cubic h_cubic(int N, double lambda, double a) {
  const double n = N;
  return Cubic{-4.0 * lambda, (n - 2.0) * (n - 10.0 - 4.0 * a), -4.0 * (2.0 + a) * (n - 4.0 - a),
               4.0 * (2.0 + a) * (2.0 + a)};
}

double bisect(const Cubic& h, double lo, double hi) {
  double flo = h(lo);
  while (hi - lo > kRootTol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = h(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double ExtendedReal::value() const {
  if (infinite_) throw ValidationError("exponent is infinite");
  return value_;
}

void to_json(nlohmann::json& j, const ExtendedReal& e) {
  if (e.is_infinite()) {
    j = "infinity";
  } else {
    j = e.value_or(0.0);
  }
}

std::string to_string(RangeCase c) {
  switch (c) {
    case RangeCase::i: return "i";
    case RangeCase::ii: return "ii";
    case RangeCase::iii: return "iii";
    case RangeCase::iv: return "iv";
  }
  return "?";
}

bool ExponentReport::admits(double p) const {
  return std::any_of(admissible_intervals.begin(), admissible_intervals.end(),
                     [p](const OpenInterval& iv) { return iv.contains(p); });
}

void to_json(nlohmann::json& j, const ExponentReport& r) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : r.admissible_intervals) intervals.push_back({{"lo", iv.lo}, {"hi", iv.hi}});
  j = nlohmann::json{{"N", r.N},
                     {"Lambda", r.lambda},
                     {"a", r.a},
                     {"gamma", r.gamma},
                     {"p_star", r.p_star},
                     {"solvable", r.solvable},
                     {"p_S", r.p_S},
                     {"p_JL", r.p_JL},
                     {"h_roots", r.h_roots},
                     {"range_case", to_string(r.range_case)},
                     {"admissible_intervals", intervals}};
}

double gamma_of(int N, double lambda) {
  if (N < 2) throw ValidationError("gamma_of: N must be >= 2");
  if (!(lambda > 0.0)) throw ValidationError("gamma_of: Lambda must be positive");
  const double b = N - 2.0;
  // Rationalized root (-b + sqrt(b^2 + 4 Lambda)) / 2, stable for small Lambda.
  return 2.0 * lambda / (b + std::sqrt(b * b + 4.0 * lambda));
}

double hardy_constant(int N, double lambda) {
  const double k = 0.5 * (N - 2.0);
  return k * k + lambda;
}

ExponentReport critical_exponents(int N, double lambda, double a) {
  ExponentReport r;
  r.N = N;
  r.lambda = lambda;
  r.a = a;
  r.gamma = gamma_of(N, lambda);
  r.p_star = a >= -2.0 ? (N + a + r.gamma) / (N - 2.0 + r.gamma) : 1.0 - (2.0 + a) / r.gamma;
  r.solvable = r.p_star > 1.0;
  r.p_S = N == 2 ? ExtendedReal::infinity() : ExtendedReal((N + 2.0) / (N - 2.0));
  r.p_JL = N <= 10 ? ExtendedReal::infinity() : ExtendedReal(1.0 + 4.0 / (N - 4.0 - 2.0 * std::sqrt(N - 1.0)));
  return r;
}

double h_poly(double q, int N, double lambda, double a) { return h_cubic(N, lambda, a)(q); }

ExponentReport admissible_range(int N, double lambda, double a) {
  ExponentReport r = critical_exponents(N, lambda, a);
  r.h_roots.clear();
  r.admissible_intervals.clear();
  r.range_case = RangeCase::iv;
  if (!(r.p_star < r.p_JL)) return r;

  const Cubic h = h_cubic(N, lambda, a);
  const double q_lo = r.p_star - 1.0;
  // Past the Cauchy bound the cubic keeps the sign of its leading term (negative).
  const double cauchy = 1.0 + std::max({std::abs(h.c2 / h.c3), std::abs(h.c1 / h.c3), std::abs(h.c0 / h.c3)});
  const double q_hi = r.p_JL.is_finite() ? r.p_JL.value() - 1.0 : std::max(q_lo, cauchy) + 1.0;

  // Monotone pieces between critical points.
  std::vector<double> breaks{q_lo};
  const double A = 3.0 * h.c3, B = 2.0 * h.c2, C = h.c1;
  const double disc = B * B - 4.0 * A * C;
  std::vector<double> tangencies;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    for (double q : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)}) {
      if (q > q_lo && q < q_hi) {
        breaks.push_back(q);
        if (std::abs(h(q)) <= 1e-13 * (std::abs(h.c0) + 1.0)) tangencies.push_back(q);
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(q_hi);

  std::vector<double> roots_q;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k], hi = breaks[k + 1];
    const double flo = h(lo), fhi = h(hi);
    if ((flo < 0.0) != (fhi < 0.0) && flo != 0.0 && fhi != 0.0) roots_q.push_back(bisect(h, lo, hi));
  }

  // Guard: a dense scan must not see more sign changes than the bracketing found.
  int scan_changes = 0;
  double prev = h(q_lo + (q_hi - q_lo) * 0.5 / kPrescanPoints);
  for (int k = 1; k < kPrescanPoints; ++k) {
    const double cur = h(q_lo + (q_hi - q_lo) * (k + 0.5) / kPrescanPoints);
    if ((cur < 0.0) != (prev < 0.0)) ++scan_changes;
    prev = cur;
  }
  if (scan_changes > static_cast<int>(roots_q.size())) {
    throw NumericalError("admissible_range: dense scan found a sign change missed by bracketing");
  }

  for (double q : roots_q) r.h_roots.push_back(1.0 + q);

  std::vector<double> cuts{q_lo};
  cuts.insert(cuts.end(), roots_q.begin(), roots_q.end());
  cuts.insert(cuts.end(), tangencies.begin(), tangencies.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(q_hi);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    if (!(hi > lo)) continue;
    if (h(0.5 * (lo + hi)) < 0.0) {
      const bool last = k + 2 == cuts.size();
      const ExtendedReal p_hi = last ? r.p_JL : ExtendedReal(1.0 + hi);
      r.admissible_intervals.push_back(OpenInterval{1.0 + lo, p_hi});
    }
  }

  const auto& iv = r.admissible_intervals;
  if (iv.empty()) {
    r.range_case = RangeCase::iv;
  } else if (iv.size() >= 2) {
    r.range_case = RangeCase::i;
  } else if (iv.front().hi == r.p_JL) {
    r.range_case = RangeCase::iii;
  } else {
    r.range_case = RangeCase::ii;
  }
  return r;
}

double tau_quadratic(double p, int N, double lambda, double tau) {
  return 1.0 / p + tau * tau / hardy_constant(N, lambda) - 1.0;
}

double tau_center(double p, int N, double a) { return (2.0 + a) / (p - 1.0) - 0.5 * (N - 2.0); }

Interval tau_window(double p, int N, double lambda, double alpha, double beta) {
  if (!(p > 1.0)) throw ValidationError("tau_window: p must exceed 1");
  const double shift = -0.5 * (N - 2.0);
  const double radius = std::sqrt(hardy_constant(N, lambda) * (1.0 - 1.0 / p));
  return Interval{std::max(shift - alpha, -radius), std::min(shift - beta, radius)};
}

std::pair<double, double> DecayWindow::rung(int j) const {
  if (j < 0) throw ValidationError("ladder index must be >= 0");
  if (j >= static_cast<int>(ladder.size())) return {alpha_star, beta_star};
  return ladder[j];
}

void to_json(nlohmann::json& j, const DecayWindow& w) {
  nlohmann::json ladder = nlohmann::json::array();
  for (const auto& [al, be] : w.ladder) ladder.push_back({al, be});
  j = nlohmann::json{{"p", w.p},
                     {"a", w.a},
                     {"alpha", w.alpha},
                     {"beta", w.beta},
                     {"alpha_star", w.alpha_star},
                     {"beta_star", w.beta_star},
                     {"j_star", w.j_star},
                     {"ladder", ladder}};
}

DecayWindow decay_window(double p, double gamma, int N, double a, std::optional<double> alpha,
                         std::optional<double> beta) {
  if (!(gamma > 0.0)) throw ValidationError("decay_window: gamma must be positive");
  const double p_star = a >= -2.0 ? (N + a + gamma) / (N - 2.0 + gamma) : 1.0 - (2.0 + a) / gamma;
  if (!(p > p_star)) throw ValidationError("decay_window: p=" + fmt(p) + " must exceed p_star=" + fmt(p_star));

  const double pivot = -(2.0 + a) / (p - 1.0);
  const double lower = -N + 2.0 - gamma;
  DecayWindow w;
  w.p = p;
  w.a = a;
  w.alpha = alpha.value_or(0.5 * (pivot + gamma));
  w.beta = beta.value_or(0.5 * (lower + pivot));

  if (!(w.alpha < gamma)) throw ValidationError("decay window violated: alpha=" + fmt(w.alpha) + " < gamma=" + fmt(gamma));
  if (!(pivot < w.alpha))
    throw ValidationError("decay window violated: -(2+a)/(p-1)=" + fmt(pivot) + " < alpha=" + fmt(w.alpha));
  if (!(w.beta < pivot))
    throw ValidationError("decay window violated: beta=" + fmt(w.beta) + " < -(2+a)/(p-1)=" + fmt(pivot));
  if (!(lower < w.beta))
    throw ValidationError("decay window violated: -N+2-gamma=" + fmt(lower) + " < beta=" + fmt(w.beta));

  // alpha_* > alpha, 0 < alpha_* < gamma, p alpha + a + alpha_* > -N, alpha + alpha_* > -N + 2.
  const double as_lo = std::max({0.0, w.alpha, -N - p * w.alpha - a, -N + 2.0 - w.alpha});
  // beta_* < beta, -N+2-gamma < beta_* < -N+2, p beta + a + beta_* < -N, beta + beta_* < -N + 2.
  const double bs_hi = std::min({-N + 2.0, w.beta, -N - p * w.beta - a, -N + 2.0 - w.beta});
  if (!(as_lo < gamma)) throw NumericalError("decay_window: empty alpha_* window");
  if (!(lower < bs_hi)) throw NumericalError("decay_window: empty beta_* window");
  w.alpha_star = 0.5 * (as_lo + gamma);
  w.beta_star = 0.5 * (lower + bs_hi);

  const double step_a = 2.0 + a + (p - 1.0) * w.alpha;  // > 0
  const double step_b = 2.0 + a + (p - 1.0) * w.beta;   // < 0
  for (int j = 0;; ++j) {
    const double aj = std::min(w.alpha + j * step_a, w.alpha_star);
    const double bj = std::max(w.beta + j * step_b, w.beta_star);
    w.ladder.emplace_back(aj, bj);
    if (aj == w.alpha_star && bj == w.beta_star) {
      w.j_star = j;
      break;
    }
  }
  return w;
}

}  // namespace conebif
