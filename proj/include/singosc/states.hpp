#pragma once

// Probability densities of the time-dependent singular oscillator on the half
// line x > 0, in units hbar = mu = 1. The time dependence enters only through
// the classical mode (eps, eps').

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "singosc/classical_mode.hpp"
#include "singosc/errors.hpp"
#include "singosc/specfun.hpp"

namespace singosc::states {

using Complex = std::complex<double>;
using mode::ModeState;

/// Upper edge of the exact Barut-Girardello branch and lower edge of the Gaussian one.
inline constexpr double kExactAlphaMaxD = 50.0;
inline constexpr double kAsymptoticMinD = 1e3;

enum class Regime { exact, asymptotic };

inline const char* to_string(Regime r) { return r == Regime::exact ? "exact" : "asymptotic"; }

struct NumberState {
  int n = 0;
};
struct AlphaState {
  Complex alpha;
};
struct ZState {
  Complex z;
};

struct StateSpec {
  std::variant<NumberState, AlphaState, ZState> kind;
  double d = 2.0;
};

struct DensityGrid {
  std::vector<double> x;
  std::vector<double> density;
  Regime regime = Regime::exact;
  double mode_time = 0.0;

  double trapezoid_integral() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (density[i] + density[i - 1]);
    return acc;
  }
};

/// Highest level for which the large-d Hermite form is offered: 3 d^{1/3},
/// i.e. n_max = 3 g*^{1/6} with d ~ sqrt(g*).
inline double asymptotic_level_limit(double d) { return 3.0 * std::cbrt(d); }

namespace detail {

inline void check_d(double d) {
  if (!(d > 0.5) || !std::isfinite(d)) throw DomainError("state: d must exceed 1/2, got " + std::to_string(d));
}
inline void check_x(double x) {
  if (!(x > 0.0)) throw DomainError("state: x must be positive");
}

// ln |Psi_n|^2 of the exact Laguerre eigenfunction (phases dropped).
inline double log_psi_n_density(int n, double d, double abs_eps_sq, double x) {
  using specfun::log_assoc_laguerre;
  const double u = x * x / abs_eps_sq;
  const auto lag = log_assoc_laguerre(n, d, u);
  if (lag.is_zero()) return -std::numeric_limits<double>::infinity();
  return std::numbers::ln2 - (d + 1.0) * std::log(abs_eps_sq) - specfun::log_gamma_ratio(d + 1.0, n) -
         specfun::log_gamma(d + 1.0) + specfun::log_factorial(n) + (2.0 * d + 1.0) * std::log(x) - u +
         2.0 * lag.log_magnitude;
}

}  // namespace detail

/// |Psi_n(x,t)|^2 = 2 |eps|^{-2(d+1)} n!/Gamma(d+n+1) x^{2d+1} e^{-x^2/|eps|^2} [L_n^d(x^2/|eps|^2)]^2.
inline double psi_n_density(int n, double d, const ModeState& mode, double x) {
  detail::check_d(d);
  detail::check_x(x);
  if (n < 0) throw DomainError("psi_n_density: n must be nonnegative");
  return std::exp(detail::log_psi_n_density(n, d, mode.abs_eps_sq(), x));
}

/// Complex eigenfunction Psi_n(x,t), principal branch for eps^{-(d+1)}.
inline Complex psi_n_wavefunction(int n, double d, const ModeState& mode, double x) {
  detail::check_d(d);
  detail::check_x(x);
  if (n < 0) throw DomainError("psi_n_wavefunction: n must be nonnegative");
  const double abs2 = mode.abs_eps_sq();
  const double u = x * x / abs2;
  const auto lag = specfun::log_assoc_laguerre(n, d, u);
  if (lag.is_zero()) return {0.0, 0.0};
  const Complex ratio = mode.eps_dot / mode.eps;
  const double arg = std::arg(mode.eps);
  const double log_mod = 0.5 * (std::numbers::ln2 - (d + 1.0) * std::log(abs2) + specfun::log_factorial(n) -
                                specfun::log_gamma(d + 1.0) - specfun::log_gamma_ratio(d + 1.0, n)) +
                         (d + 0.5) * std::log(x) - 0.5 * x * x * ratio.imag() + lag.log_magnitude;
  const double phase = -(d + 1.0) * arg - 2.0 * n * arg + 0.5 * x * x * ratio.real();
  return static_cast<double>(lag.sign) * std::polar(std::exp(log_mod), phase);
}

/// Large-d Hermite form of |Psi_n|^2 with y = x^2 - |eps|^2 (d+1):
/// (2 pi d)^{-1/2} 2x / (|eps|^2 2^n n!) exp(-y^2 / (2 |eps|^4 d)) H_n(-y / (sqrt(2d) |eps|^2))^2.
inline double psi_n_density_asymptotic(int n, double d, const ModeState& mode, double x) {
  detail::check_x(x);
  if (!(d >= kAsymptoticMinD)) throw RegimeError("psi_n_density_asymptotic: requires d >= 1e3");
  if (n < 0 || n > asymptotic_level_limit(d)) {
    throw RegimeError("psi_n_density_asymptotic: n must lie in [0, 3 d^{1/3}]");
  }
  const double e2 = mode.abs_eps_sq();
  const double y = x * x - e2 * (d + 1.0);
  const auto h = specfun::log_hermite(n, -y / (std::sqrt(2.0 * d) * e2));
  if (h.is_zero()) return 0.0;
  const double log_density = -0.5 * std::log(2.0 * std::numbers::pi * d) + std::log(2.0 * x / e2) -
                             n * std::numbers::ln2 - specfun::log_factorial(n) - y * y / (2.0 * e2 * e2 * d) +
                             2.0 * h.log_magnitude;
  return std::exp(log_density);
}

/// Density that is Gaussian in x^2 around mean_x2 with standard deviation |eps|^2 sqrt(d).
inline double gaussian_x2_density(double mean_x2, double d, const ModeState& mode, double x) {
  detail::check_x(x);
  const double e2 = mode.abs_eps_sq();
  const double dev = x * x - mean_x2;
  return std::exp(-0.5 * std::log(2.0 * std::numbers::pi * d) + std::log(2.0 * x / e2) -
                  dev * dev / (2.0 * e2 * e2 * d));
}

/// <alpha|B|alpha>: 1 + |a|^2 I_d'(|a|^2)/I_d(|a|^2) for d <= 50, 1 + d + |a|^4/(2d) for d >= 1e3.
inline double mean_B_alpha(Complex alpha, double d) {
  detail::check_d(d);
  const double z = std::norm(alpha);
  if (d <= kExactAlphaMaxD) return 1.0 + specfun::bessel_i_log_derivative_times_z(d, z);
  if (d >= kAsymptoticMinD) return 1.0 + d + z * z / (2.0 * d);
  throw RegimeError("mean_B_alpha: d in (50, 1e3) is outside both validated branches");
}

/// Large-d mean of x^2 in an alpha-state: |eps|^2 (1 + d + |a|^4/(2d)) - Re(conj(eps)^2 a^2).
inline double mean_x2_alpha_asymptotic(Complex alpha, double d, const ModeState& mode) {
  const double z = std::norm(alpha);
  return mode.abs_eps_sq() * (1.0 + d + z * z / (2.0 * d)) -
         (std::conj(mode.eps) * std::conj(mode.eps) * alpha * alpha).real();
}

/// Exact mean of x^2 in a z-state, (d+1) |eps - z conj(eps)|^2 / (1 - |z|^2).
inline double mean_x2_z(Complex z, double d, const ModeState& mode) {
  return (d + 1.0) * std::norm(mode.eps - z * std::conj(mode.eps)) / (1.0 - std::norm(z));
}

/// Second-order small-z expansion of mean_x2_z: (d+1)[|eps|^2 (1 + 2|z|^2) - 2 Re(eps^2 conj(z))].
inline double mean_x2_z_approx(Complex z, double d, const ModeState& mode) {
  return (d + 1.0) *
         (mode.abs_eps_sq() * (1.0 + 2.0 * std::norm(z)) - 2.0 * (mode.eps * mode.eps * std::conj(z)).real());
}

/// Density of the Barut-Girardello state |alpha>. For d <= 50 the expansion over
/// Psi_n is summed until terms drop below 1e-16 of the partial sum; for d >= 1e3
/// the Gaussian-in-x^2 form is used. The gap in between is rejected.
inline double alpha_state_density(Complex alpha, double d, const ModeState& mode, double x) {
  detail::check_d(d);
  detail::check_x(x);
  if (d >= kAsymptoticMinD) return gaussian_x2_density(mean_x2_alpha_asymptotic(alpha, d, mode), d, mode, x);
  if (d > kExactAlphaMaxD) throw RegimeError("alpha_state_density: d in (50, 1e3) is outside both validated branches");

  const double e2 = mode.abs_eps_sq();
  const double u = x * x / e2;
  // sum_n w^n L_n^d(u) / (d+1)_n with w = alpha^2 conj(eps) / (2 eps)
  const Complex w = alpha * alpha * std::conj(mode.eps) / (2.0 * mode.eps);
  std::complex<long double> sum = 1.0L;
  std::complex<long double> coef = 1.0L;
  long double l_prev = 1.0L, l_cur = 1.0L + d - u;
  int small_run = 0;
  constexpr int kMaxTerms = 20000;
  int n = 1;
  for (; n < kMaxTerms; ++n) {
    if (n > 1) {
      const long double next = ((2.0L * (n - 1) + 1.0L + d - u) * l_cur - ((n - 1) + static_cast<long double>(d)) * l_prev) / n;
      l_prev = l_cur;
      l_cur = next;
    }
    coef *= std::complex<long double>(w) / static_cast<long double>(d + n);
    const auto term = coef * l_cur;
    sum += term;
    if (std::abs(term) < 1e-16L * std::abs(sum)) {
      if (++small_run >= 3 && n > u) break;
    } else {
      small_run = 0;
    }
    if (coef == 0.0L) break;
  }
  if (n >= kMaxTerms) throw DomainError("alpha_state_density: series did not converge");
  const double log_s = specfun::detail::bessel_i_series(d, std::norm(alpha)).log_sum;
  const double abs_sum = static_cast<double>(std::abs(sum));
  if (abs_sum == 0.0) return 0.0;
  const double log_density = std::numbers::ln2 - (d + 1.0) * std::log(e2) + (2.0 * d + 1.0) * std::log(x) - u -
                             specfun::log_gamma(d + 1.0) + 2.0 * std::log(abs_sum) - log_s;
  return std::exp(log_density);
}

/// Exact density of the power-Gaussian state |z>:
/// 2x^{2d+1}/Gamma(d+1) (1-|z|^2)^{d+1} |eps - z conj(eps)|^{-2(d+1)} exp(-x^2 Im Q),
/// Q = (eps' - z conj(eps')) / (eps - z conj(eps)).
inline double z_state_density(Complex z, double d, const ModeState& mode, double x) {
  detail::check_d(d);
  detail::check_x(x);
  if (!(std::abs(z) < 1.0)) throw DomainError("z_state_density: requires |z| < 1");
  const Complex den = mode.eps - z * std::conj(mode.eps);
  const Complex q = (mode.eps_dot - z * std::conj(mode.eps_dot)) / den;
  const double log_density = std::numbers::ln2 + (2.0 * d + 1.0) * std::log(x) - specfun::log_gamma(d + 1.0) +
                             (d + 1.0) * std::log1p(-std::norm(z)) - (d + 1.0) * std::log(std::norm(den)) -
                             x * x * q.imag();
  return std::exp(log_density);
}

struct Moments {
  double x2;           // <x^2>
  double energy_like;  // <p^2/2 + g/x^2>
  double xp_sym;       // <xp + px>
};

/// Mean values of the su(1,1) generators from <B>, <A^dagger> and the mode.
inline Moments moments(double B_mean, Complex A_dag_mean, const ModeState& mode) {
  const Complex e = mode.eps, ed = mode.eps_dot;
  return {std::norm(e) * B_mean - (e * e * A_dag_mean).real(),
          0.5 * (std::norm(ed) * B_mean - (ed * ed * A_dag_mean).real()),
          2.0 * ((ed * std::conj(e)).real() * B_mean - (ed * e * A_dag_mean).real())};
}

/// Density of any state at x. Number states honour `regime`; alpha states pick
/// their branch from d; z-states use the exact form, or for `asymptotic` the
/// Gaussian in x^2 around the exact mean.
inline double density(const StateSpec& spec, const ModeState& mode, double x, Regime regime) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, NumberState>) {
          return regime == Regime::exact ? psi_n_density(s.n, spec.d, mode, x)
                                         : psi_n_density_asymptotic(s.n, spec.d, mode, x);
        } else if constexpr (std::is_same_v<S, AlphaState>) {
          return alpha_state_density(s.alpha, spec.d, mode, x);
        } else {
          if (regime == Regime::exact) return z_state_density(s.z, spec.d, mode, x);
          if (!(std::abs(s.z) < 1.0)) throw DomainError("z-state: requires |z| < 1");
          return gaussian_x2_density(mean_x2_z(s.z, spec.d, mode), spec.d, mode, x);
        }
      },
      spec.kind);
}

/// Effective regime of an evaluation: alpha states are fixed by d.
inline Regime effective_regime(const StateSpec& spec, Regime requested) {
  if (std::holds_alternative<AlphaState>(spec.kind)) {
    return spec.d >= kAsymptoticMinD ? Regime::asymptotic : Regime::exact;
  }
  return requested;
}

inline DensityGrid evaluate_grid(const StateSpec& spec, const ModeState& mode, const std::vector<double>& xs,
                                 Regime regime) {
  DensityGrid g;
  g.x = xs;
  g.regime = effective_regime(spec, regime);
  g.mode_time = mode.t;
  g.density.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0 && !(xs[i] > xs[i - 1])) throw DomainError("evaluate_grid: x must be strictly increasing");
    g.density.push_back(density(spec, mode, xs[i], regime));
  }
  return g;
}

}  // namespace singosc::states
