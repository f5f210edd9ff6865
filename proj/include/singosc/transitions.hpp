#pragma once

// Transition probabilities W_n^m between energy eigenstates of the singular
// oscillator after a frequency history with reflection coefficient r.
// Every probability is exp(sum of log factors) * polynomial^2.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "singosc/errors.hpp"
#include "singosc/specfun.hpp"

namespace singosc::transitions {

enum class Regime { ExactJacobi, ExactHypergeom, Oscillator, LargeD, LargeDPoisson, Adiabatic };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::ExactJacobi: return "exact-jacobi";
    case Regime::ExactHypergeom: return "exact-hypergeom";
    case Regime::Oscillator: return "oscillator";
    case Regime::LargeD: return "large-d";
    case Regime::LargeDPoisson: return "large-d-poisson";
    case Regime::Adiabatic: return "adiabatic";
  }
  return "?";
}

inline Regime regime_from_string(const std::string& s) {
  for (Regime r : {Regime::ExactJacobi, Regime::ExactHypergeom, Regime::Oscillator, Regime::LargeD,
                   Regime::LargeDPoisson, Regime::Adiabatic}) {
    if (s == to_string(r)) return r;
  }
  if (s == "exact") return Regime::ExactJacobi;
  throw DomainError("unknown transition regime '" + s + "'");
}

namespace detail {

inline void check_levels(int n, int m) {
  if (n < 0 || m < 0) throw DomainError("transition: levels must be nonnegative");
}

inline void check_r(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("transition: r must lie in [0, 1), got " + std::to_string(r));
}

inline void check_d(double d) {
  if (!(d == -0.5 || d >= 0.5) || !std::isfinite(d)) {
    throw DomainError("transition: d must be >= 1/2 or exactly -1/2, got " + std::to_string(d));
  }
}

// alpha ln r, with r^0 = 1 including r = 0.
inline double log_power(double r, int alpha) {
  if (alpha == 0) return 0.0;
  return alpha * std::log(r);
}

}  // namespace detail

/// W_n^m = [mu! Gamma(nu+d+1) / (nu! Gamma(mu+d+1))] r^{|m-n|} (1-r)^{d+1} [P_mu^{(|m-n|, d)}(1-2r)]^2,
/// mu = min(m,n), nu = max(m,n).
inline double w_exact(int n, int m, double d, double r) {
  detail::check_levels(n, m);
  detail::check_d(d);
  detail::check_r(r);
  const int mu = std::min(m, n), nu = std::max(m, n), gap = nu - mu;
  if (gap > 0 && r == 0.0) return 0.0;
  const auto p = specfun::log_jacobi_at_one_minus(mu, gap, d, 2.0 * r);
  if (p.is_zero()) return 0.0;
  const double log_w = -specfun::log_gamma_ratio(mu + 1.0, gap) + specfun::log_gamma_ratio(mu + d + 1.0, gap) +
                       detail::log_power(r, gap) + (d + 1.0) * std::log1p(-r) + 2.0 * p.log_magnitude;
  return std::exp(log_w);
}

/// Same probability through F(-mu, nu+d+1; |m-n|+1; r).
inline double w_exact_hypergeom(int n, int m, double d, double r) {
  detail::check_levels(n, m);
  detail::check_d(d);
  detail::check_r(r);
  const int mu = std::min(m, n), nu = std::max(m, n), gap = nu - mu;
  if (gap > 0 && r == 0.0) return 0.0;
  const auto f = specfun::log_hypergeom_terminating(-mu, nu + d + 1.0, gap + 1.0, r);
  if (f.is_zero()) return 0.0;
  const double log_w = specfun::log_gamma_ratio(mu + 1.0, gap) + specfun::log_gamma_ratio(mu + d + 1.0, gap) -
                       2.0 * specfun::log_factorial(gap) + detail::log_power(r, gap) + (d + 1.0) * std::log1p(-r) +
                       2.0 * f.log_magnitude;
  return std::exp(log_w);
}

/// Harmonic-oscillator levels k, j (same parity):
/// k! j! r^{|k-j|/2} sqrt(1-r) / (2^{|k-j|} ((k+j)/2)!^2) [P_min^{(|k-j|/2, |k-j|/2)}(sqrt(1-r))]^2.
/// Opposite parity gives exactly 0.
inline double w_oscillator(int k, int j, double r) {
  detail::check_levels(k, j);
  detail::check_r(r);
  if ((k - j) % 2 != 0) return 0.0;
  const int lo = std::min(k, j), gap = std::abs(k - j), half = gap / 2;
  if (gap > 0 && r == 0.0) return 0.0;
  // 1 - sqrt(1-r) without cancellation
  const double t = r / (1.0 + std::sqrt(1.0 - r));
  const auto p = specfun::log_jacobi_at_one_minus(lo, half, half, t);
  if (p.is_zero()) return 0.0;
  const double log_w = specfun::log_factorial(k) + specfun::log_factorial(j) + detail::log_power(r, half) +
                       0.5 * std::log1p(-r) - gap * std::numbers::ln2 - 2.0 * specfun::log_factorial((k + j) / 2) +
                       2.0 * p.log_magnitude;
  return std::exp(log_w);
}

/// Large-d limit in the exponential form valid for r^2 d << 1:
/// (mu!/nu!) (rd)^{|m-n|} e^{-rd} [L_mu^{|m-n|}(rd)]^2.
inline double w_large_d(int n, int m, double rd) {
  detail::check_levels(n, m);
  if (!(rd >= 0.0) || !std::isfinite(rd)) throw DomainError("w_large_d: rd must be nonnegative");
  const int mu = std::min(m, n), nu = std::max(m, n), gap = nu - mu;
  if (gap > 0 && rd == 0.0) return 0.0;
  const auto lag = specfun::log_assoc_laguerre(mu, gap, rd);
  if (lag.is_zero()) return 0.0;
  const double log_w = -specfun::log_gamma_ratio(mu + 1.0, gap) + detail::log_power(rd, gap) - rd +
                       2.0 * lag.log_magnitude;
  return std::exp(log_w);
}

/// Large-d limit keeping the full (1-r)^{d+1} factor.
inline double w_large_d_full(int n, int m, double d, double r) {
  detail::check_levels(n, m);
  detail::check_d(d);
  detail::check_r(r);
  const double rd = r * d;
  const int mu = std::min(m, n), nu = std::max(m, n), gap = nu - mu;
  if (gap > 0 && r == 0.0) return 0.0;
  const auto lag = specfun::log_assoc_laguerre(mu, gap, rd);
  if (lag.is_zero()) return 0.0;
  const double log_w = -specfun::log_gamma_ratio(mu + 1.0, gap) + detail::log_power(rd, gap) +
                       (d + 1.0) * std::log1p(-r) + 2.0 * lag.log_magnitude;
  return std::exp(log_w);
}

/// Leading Laguerre term for rd >> m, n: (rd)^{m+n} e^{-rd} / (m! n!).
inline double w_large_d_poisson(int n, int m, double rd) {
  detail::check_levels(n, m);
  if (!(rd >= 0.0) || !std::isfinite(rd)) throw DomainError("w_large_d_poisson: rd must be nonnegative");
  if (rd == 0.0) return (n == 0 && m == 0) ? 1.0 : 0.0;
  const int lo = std::min(m, n), hi = std::max(m, n);
  return std::exp((n + m) * std::log(rd) - rd - specfun::log_factorial(lo) - specfun::log_factorial(hi));
}

/// Smallness parameter of the first-order expansion: r (2mn + (d+1)(m+n+1)).
inline double adiabatic_parameter(int n, int m, double d, double r) {
  return r * (2.0 * m * n + (d + 1.0) * (m + n + 1.0));
}

/// First-order small-r expansion:
/// nu! Gamma(nu+d+1) / (mu! Gamma(mu+d+1)) r^{|m-n|} / |m-n|!^2 [1 - (2mn + (d+1)(m+n+1)) r / (|m-n|+1)].
inline double w_adiabatic(int n, int m, double d, double r) {
  detail::check_levels(n, m);
  detail::check_d(d);
  detail::check_r(r);
  if (!(adiabatic_parameter(n, m, d, r) < 0.1)) {
    throw RegimeError("w_adiabatic: r (2mn + (d+1)(m+n+1)) must be < 0.1 for the expansion to hold");
  }
  const int mu = std::min(m, n), nu = std::max(m, n), gap = nu - mu;
  if (gap > 0 && r == 0.0) return 0.0;
  const double log_lead = specfun::log_gamma_ratio(mu + 1.0, gap) + specfun::log_gamma_ratio(mu + d + 1.0, gap) +
                          detail::log_power(r, gap) - 2.0 * specfun::log_factorial(gap);
  const double bracket = 1.0 - adiabatic_parameter(n, m, d, r) / (gap + 1.0);
  return std::exp(log_lead) * bracket;
}

/// Single entry in the chosen regime. The oscillator regime maps singular-oscillator
/// levels (n, m) at d = +1/2 to oscillator levels (2n+1, 2m+1), at d = -1/2 to (2n, 2m).
inline double probability(Regime regime, int n, int m, double d, double r) {
  switch (regime) {
    case Regime::ExactJacobi: return w_exact(n, m, d, r);
    case Regime::ExactHypergeom: return w_exact_hypergeom(n, m, d, r);
    case Regime::Oscillator: {
      if (d != 0.5 && d != -0.5) throw RegimeError("oscillator regime requires d = +1/2 or -1/2");
      const int shift = d > 0 ? 1 : 0;
      return w_oscillator(2 * n + shift, 2 * m + shift, r);
    }
    case Regime::LargeD:
      if (!(d >= 1e3)) throw RegimeError("large-d regime requires d >= 1e3");
      return w_large_d(n, m, r * d);
    case Regime::LargeDPoisson:
      if (!(d >= 1e3)) throw RegimeError("large-d-poisson regime requires d >= 1e3");
      return w_large_d_poisson(n, m, r * d);
    case Regime::Adiabatic: return w_adiabatic(n, m, d, r);
  }
  throw DomainError("unknown regime");
}

struct TransitionMatrix {
  Regime regime = Regime::ExactJacobi;
  double d = 0.0;
  double r = 0.0;
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<double>> entries;  // entries[n][m]
  std::vector<double> row_sums;
  std::vector<double> tail_bounds;   // bound on sum_{m >= cols} W_n^m, per row
  std::vector<int> tail_onsets;      // first column of the bounded decay (-1: none)
  double tail_bound = 0.0;           // max over rows

  double at(int n, int m) const { return entries.at(n).at(m); }
};

namespace detail {

struct Tail {
  double bound;
  int onset;
};

// Remainder bound for an exact row. Exact rows decay like poly(m) r^m, so the
// consecutive ratio tends to `limit_ratio` (= r). Over the longest trailing run
// of decaying entries (ratio < 1) the tail is bounded by a geometric series
// with the larger of the worst observed ratio and the limit.
inline Tail geometric_tail(const std::vector<double>& w, int min_index, double limit_ratio) {
  const int cols = static_cast<int>(w.size());
  if (cols < 4) return {1.0, -1};
  if (w[cols - 1] == 0.0) {
    int j = cols - 1;
    while (j > min_index && w[j - 1] == 0.0) --j;
    if (j > min_index + 1 && w[j - 1] < w[j - 2]) return {std::numeric_limits<double>::denorm_min(), j - 2};
    return {1.0, -1};
  }
  double q_max = limit_ratio;
  int onset = -1;
  for (int j = cols - 2; j >= std::max(min_index, 0); --j) {
    if (!(w[j] > 0.0)) break;
    const double q = w[j + 1] / w[j];
    if (!(q < 1.0)) break;
    q_max = std::max(q_max, q);
    onset = j;
  }
  if (onset == -1 || cols - 1 - onset < 3 || !(q_max < 1.0)) return {1.0, -1};
  return {w[cols - 1] * q_max / (1.0 - q_max), onset};
}

// Rigorous large-d tail. With |L_n^a(x)| <= (m + x)^n / n! for a = m - n,
// W_n^m <= x^{m-n} e^{-x} (m+x)^{2n} / (m! n!); consecutive bounds have ratio
// at most q = x/(M+1) (1 + 1/(M+x))^{2n} beyond column M.
inline Tail displaced_number_tail(int n, double x, int cols) {
  const int M = cols;
  if (M <= n) return {1.0, -1};
  const double q = x / (M + 1.0) * std::pow(1.0 + 1.0 / (M + x), 2.0 * n);
  if (!(q < 1.0)) return {1.0, -1};
  const double log_b = (x > 0 ? (M - n) * std::log(x) : (M == n ? 0.0 : -INFINITY)) - x +
                       2.0 * n * std::log(M + x) - specfun::log_factorial(M) - specfun::log_factorial(n);
  return {std::exp(log_b) / (1.0 - q), M};
}

// Chernoff bound on the Poisson-shaped leading-term row:
// sum_{m >= M} x^m/m! e^{-x} <= e^{-x} (e x / M)^M for M > x.
inline Tail poisson_tail(int n, double x, int cols) {
  const int M = cols;
  if (!(M > x)) return {1.0, -1};
  const double pref = std::exp(n * std::log(std::max(x, 1e-300)) - specfun::log_factorial(n));
  if (x == 0.0) return {0.0, M};
  return {pref * std::exp(-x + M * (1.0 + std::log(x / M))), M};
}

}  // namespace detail

/// Fills W[n][m] for n < rows, m < cols with the chosen regime, and records row
/// sums with a bound on the probability beyond the last column.
inline TransitionMatrix transition_matrix(double d, double r, int rows, int cols, Regime regime) {
  if (rows < 1 || cols < 1 || rows > 200 || cols > 200) {
    throw DomainError("transition_matrix: rows and cols must lie in [1, 200]");
  }
  detail::check_r(r);
  TransitionMatrix t;
  t.regime = regime;
  t.d = d;
  t.r = r;
  t.rows = rows;
  t.cols = cols;
  t.entries.assign(rows, std::vector<double>(cols, 0.0));
  for (int n = 0; n < rows; ++n) {
    for (int m = 0; m < cols; ++m) t.entries[n][m] = probability(regime, n, m, d, r);
    const auto& row = t.entries[n];
    long double acc = 0.0L;
    for (double w : row) acc += w;
    t.row_sums.push_back(static_cast<double>(acc));

    detail::Tail tail{1.0, -1};
    switch (regime) {
      case Regime::LargeD: tail = detail::displaced_number_tail(n, r * d, cols); break;
      case Regime::LargeDPoisson: tail = detail::poisson_tail(n, r * d, cols); break;
      case Regime::ExactJacobi:
      case Regime::ExactHypergeom:
      case Regime::Oscillator:
      case Regime::Adiabatic: tail = detail::geometric_tail(row, n + 1, r); break;
    }
    if (r == 0.0 && n < cols) tail = {0.0, n + 1};
    tail.bound = std::min(tail.bound, 1.0);
    t.tail_bounds.push_back(tail.bound);
    t.tail_onsets.push_back(tail.onset);
    t.tail_bound = std::max(t.tail_bound, tail.bound);
  }
  return t;
}

}  // namespace singosc::transitions
