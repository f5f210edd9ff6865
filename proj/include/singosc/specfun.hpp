#pragma once

// Special-function kernel for the singular oscillator. Everything that can
// reach extreme magnitude (Gamma ratios, polynomials with a huge parameter,
// large-order Bessel functions) is returned as a LogValue.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "singosc/errors.hpp"

namespace singosc::specfun {

/// Signed value stored as (ln|v|, sign). sign == 0 represents exactly zero.
struct LogValue {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static LogValue zero() { return {}; }

  static LogValue from(double v) {
    if (v == 0.0) return zero();
    return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
  }

  static LogValue from_log(double log_magnitude, int sign = 1) {
    if (sign == 0) return zero();
    return {log_magnitude, sign > 0 ? 1 : -1};
  }

  bool is_zero() const { return sign == 0; }

  /// Linear value; overflows to +-inf or underflows to 0 when out of range.
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }

  LogValue operator*(const LogValue& o) const {
    if (sign == 0 || o.sign == 0) return zero();
    return {log_magnitude + o.log_magnitude, sign * o.sign};
  }
  LogValue operator/(const LogValue& o) const {
    if (o.sign == 0) throw DomainError("LogValue: division by zero");
    if (sign == 0) return zero();
    return {log_magnitude - o.log_magnitude, sign * o.sign};
  }
  /// Square, always nonnegative.
  LogValue squared() const {
    if (sign == 0) return zero();
    return {2.0 * log_magnitude, 1};
  }
};

/// ln Gamma(x) for x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be positive and finite, got " + std::to_string(x));
  }
  return boost::math::lgamma(x);
}

inline double log_factorial(int n) {
  if (n < 0) throw DomainError("log_factorial: negative argument");
  return log_gamma(static_cast<double>(n) + 1.0);
}

/// ln[Gamma(a + k) / Gamma(a)] for a > 0 and integer k >= 0, i.e. the log of
/// the Pochhammer symbol (a)_k. Short products are summed term by term, which
/// avoids the cancellation between two ~1e6-sized lgamma values when a ~ 1e5.
inline double log_gamma_ratio(double a, int k) {
  if (!(a > 0.0)) throw DomainError("log_gamma_ratio: a must be positive");
  if (k < 0) throw DomainError("log_gamma_ratio: k must be nonnegative");
  if (k <= 4096) {
    long double acc = 0.0L;
    for (int j = 0; j < k; ++j) acc += std::log(static_cast<long double>(a) + j);
    return static_cast<double>(acc);
  }
  return log_gamma(a + k) - log_gamma(a);
}

namespace detail {

// Two-term recurrence state with a shared power-of-two scale, so that degree
// ~10^2 polynomials with a ~10^5 parameter do not overflow.
struct ScaledPair {
  long double prev = 0.0L;
  long double cur = 1.0L;
  double log_scale = 0.0;

  void push(long double next) {
    prev = cur;
    cur = next;
    const long double big = 0x1p+600L;
    const long double m = std::max(std::fabs(prev), std::fabs(cur));
    if (m > big) {
      prev /= big;
      cur /= big;
      log_scale += 600.0 * std::numbers::ln2;
    }
  }

  LogValue result() const {
    if (cur == 0.0L) return LogValue::zero();
    return LogValue::from_log(static_cast<double>(std::log(std::fabs(cur))) + log_scale,
                              cur > 0 ? 1 : -1);
  }
};

}  // namespace detail

/// Associated Laguerre polynomial L_n^a(x) in log form, by upward recurrence in n.
inline LogValue log_assoc_laguerre(int n, double a, double x) {
  if (n < 0) throw DomainError("assoc_laguerre: degree must be nonnegative");
  if (!(a > -1.0)) throw DomainError("assoc_laguerre: parameter must exceed -1");
  if (n == 0) return LogValue::from(1.0);
  const long double a_minus_x = static_cast<long double>(a) - x;
  detail::ScaledPair p;
  p.prev = 1.0L;
  p.cur = 1.0L + a_minus_x;
  for (int k = 1; k < n; ++k) {
    const long double next = ((2.0L * k + 1.0L + a_minus_x) * p.cur - (k + static_cast<long double>(a)) * p.prev) / (k + 1.0L);
    p.push(next);
  }
  return p.result();
}

inline double assoc_laguerre(int n, double a, double x) { return log_assoc_laguerre(n, a, x).value(); }

/// Jacobi polynomial P_n^{(a,b)} evaluated at x = 1 - t.
///
/// The recurrence is written in terms of t so that the x -> 1 limit with a huge b
/// does not cancel: the standard coefficient (2n+s)(2n+s-2)x + a^2 - b^2 equals
/// -(2n+s)(2n+s-2)t + s(2a+4n-2) + 4n(n-1) with s = a + b.
inline LogValue log_jacobi_at_one_minus(int n, double a, double b, double t) {
  if (n < 0) throw DomainError("jacobi: degree must be nonnegative");
  if (!(a > -1.0) || !(b > -1.0)) throw DomainError("jacobi: parameters must exceed -1");
  if (n == 0) return LogValue::from(1.0);
  const long double A = a, B = b, T = t, S = A + B;
  detail::ScaledPair p;
  p.prev = 1.0L;
  p.cur = (A + 1.0L) - (S + 2.0L) * T / 2.0L;
  for (int k = 2; k <= n; ++k) {
    const long double c1 = 2.0L * k * (k + S) * (2.0L * k + S - 2.0L);
    const long double c2 =
        (2.0L * k + S - 1.0L) * (-(2.0L * k + S) * (2.0L * k + S - 2.0L) * T + S * (2.0L * A + 4.0L * k - 2.0L) +
                                 4.0L * k * (k - 1.0L));
    const long double c3 = 2.0L * (k + A - 1.0L) * (k + B - 1.0L) * (2.0L * k + S);
    p.push((c2 * p.cur - c3 * p.prev) / c1);
  }
  return p.result();
}

inline LogValue log_jacobi(int n, double a, double b, double x) {
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError("jacobi: x must lie in [-1, 1]");
  return log_jacobi_at_one_minus(n, a, b, 1.0 - x);
}

inline double jacobi(int n, double a, double b, double x) { return log_jacobi(n, a, b, x).value(); }

/// Physicists' Hermite polynomial H_n(x).
inline LogValue log_hermite(int n, double x) {
  if (n < 0) throw DomainError("hermite: degree must be nonnegative");
  if (n == 0) return LogValue::from(1.0);
  detail::ScaledPair p;
  p.prev = 1.0L;
  p.cur = 2.0L * x;
  for (int k = 1; k < n; ++k) p.push(2.0L * x * p.cur - 2.0L * k * p.prev);
  return p.result();
}

inline double hermite(int n, double x) { return log_hermite(n, x).value(); }

namespace detail {

// Sum of the terminating series sum_k prod_{j<k} ratio(j) for k = 0..n. Alternating
// series cancel badly, so the sum is accumulated in multiprecision floats; the
// precision is raised until the cancellation (max |term| / |sum|) leaves at least
// 20 significant digits. `ratio(j, T{})` returns the term ratio in type T.
template <class T, class Ratio>
bool sum_terminating(int n, Ratio ratio, LogValue& out) {
  using std::abs;
  using boost::multiprecision::abs;
  T term = 1, sum = 1, biggest = 1;
  for (int k = 0; k < n; ++k) {
    term *= ratio(k, T{});
    if (term == 0) break;
    sum += term;
    if (abs(term) > biggest) biggest = abs(term);
  }
  if (sum == 0) {
    out = LogValue::zero();
    return false;
  }
  const T lost = log10(biggest / abs(sum));
  out = LogValue::from_log(static_cast<double>(log(abs(sum))), sum > 0 ? 1 : -1);
  return lost < std::numeric_limits<T>::digits10 - 20;
}

template <class Ratio>
LogValue terminating_series(int n, Ratio ratio) {
  namespace mp = boost::multiprecision;
  LogValue out;
  if (sum_terminating<mp::cpp_bin_float_50>(n, ratio, out)) return out;
  if (sum_terminating<mp::cpp_bin_float_100>(n, ratio, out)) return out;
  sum_terminating<mp::number<mp::cpp_bin_float<300>>>(n, ratio, out);
  return out;
}

inline void check_terminating(int neg_n, double c) {
  if (neg_n > 0) throw DomainError("hypergeom_terminating: first parameter must be a nonpositive integer");
  if (c <= 0.0 && c == std::floor(c) && c >= neg_n) {
    throw DomainError("hypergeom_terminating: c is a nonpositive integer >= a, series is undefined");
  }
}

}  // namespace detail

/// Terminating Gauss series F(-n, b; c; z) = sum_{k=0}^{n} (-n)_k (b)_k / ((c)_k k!) z^k.
inline LogValue log_hypergeom_terminating(int neg_n, double b, double c, double z) {
  detail::check_terminating(neg_n, c);
  return detail::terminating_series(-neg_n, [&](int k, auto zero) {
    using T = decltype(zero);
    return (T(neg_n) + k) * (T(b) + k) * T(z) / ((T(c) + k) * (k + 1));
  });
}

inline double hypergeom_terminating(int neg_n, double b, double c, double z) {
  return log_hypergeom_terminating(neg_n, b, c, z).value();
}

/// Terminating confluent series Phi(-n; c; z) = sum_k (-n)_k / ((c)_k k!) z^k.
inline LogValue log_confluent_terminating(int neg_n, double c, double z) {
  detail::check_terminating(neg_n, c);
  return detail::terminating_series(-neg_n, [&](int k, auto zero) {
    using T = decltype(zero);
    return (T(neg_n) + k) * T(z) / ((T(c) + k) * (k + 1));
  });
}

inline double confluent_terminating(int neg_n, double c, double z) {
  return log_confluent_terminating(neg_n, c, z).value();
}

/// Large-order asymptotic form of the modified Bessel function I_d(z), valid for
/// d >> 1 and z < d:
///   sqrt(2 pi) I_d(z) ~ (d^2+z^2)^{-1/4} exp[sqrt(d^2+z^2) + d ln(z / (d + sqrt(d^2+z^2)))].
inline LogValue bessel_i_large_order(double d, double z) {
  if (!(d >= 100.0)) throw DomainError("bessel_i_large_order: requires d >= 100");
  if (!(z >= 0.0) || !(z < d)) throw DomainError("bessel_i_large_order: requires 0 <= z < d");
  if (z == 0.0) return LogValue::zero();
  const double root = std::hypot(d, z);
  const double log_i = -0.5 * std::log(2.0 * std::numbers::pi) - 0.25 * std::log(root * root) + root +
                       d * std::log(z / (d + root));
  return LogValue::from_log(log_i);
}

namespace detail {

// Ascending series of I_d(z) relative to its leading term:
//   I_d(z) = (z/2)^d / Gamma(d+1) * sum_k t_k,  t_k = (z/2)^{2k} / (k! (d+1)_k).
// Returns ln(sum t_k) and ln(sum (2k+d) t_k).
struct BesselSeries {
  double log_sum = 0.0;
  double log_weighted = 0.0;
};

inline BesselSeries bessel_i_series(double d, double z) {
  const long double q = static_cast<long double>(z) * z / 4.0L;
  long double term = 1.0L, sum = 1.0L, weighted = d;
  double log_scale = 0.0;
  for (int k = 0; k < 1'000'000; ++k) {
    term *= q / ((k + 1.0L) * (k + 1.0L + d));
    sum += term;
    weighted += (2.0L * (k + 1) + d) * term;
    if (sum > 0x1p+8000L) {
      term /= 0x1p+8000L;
      sum /= 0x1p+8000L;
      weighted /= 0x1p+8000L;
      log_scale += 8000.0 * std::numbers::ln2;
    }
    if ((k + 2.0L) * (k + 2.0L + d) > q && term < 1e-19L * sum) break;
  }
  return {static_cast<double>(std::log(sum)) + log_scale, static_cast<double>(std::log(weighted)) + log_scale};
}

}  // namespace detail

/// Modified Bessel function I_d(z) from its ascending series, d > -1, z >= 0.
inline LogValue log_bessel_i(double d, double z) {
  if (!(d > -1.0)) throw DomainError("log_bessel_i: order must exceed -1");
  if (!(z >= 0.0)) throw DomainError("log_bessel_i: argument must be nonnegative");
  if (z == 0.0) return d == 0.0 ? LogValue::from(1.0) : LogValue::zero();
  const auto s = detail::bessel_i_series(d, z);
  return LogValue::from_log(d * std::log(z / 2.0) - log_gamma(d + 1.0) + s.log_sum);
}

/// z I_d'(z) / I_d(z), from the same series; tends to d as z -> 0.
inline double bessel_i_log_derivative_times_z(double d, double z) {
  if (!(d > 0.0)) throw DomainError("bessel_i_log_derivative_times_z: order must be positive");
  if (!(z >= 0.0)) throw DomainError("bessel_i_log_derivative_times_z: argument must be nonnegative");
  if (z == 0.0) return d;
  const auto s = detail::bessel_i_series(d, z);
  return std::exp(s.log_weighted - s.log_sum);
}

}  // namespace singosc::specfun
