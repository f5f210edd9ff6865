#pragma once

// Classical mode function of the time-dependent oscillator: eps'' + omega^2(t) eps = 0
// with Wronskian eps' conj(eps) - conj(eps') eps = 2i, plus the Bogoliubov
// decomposition of the late-time mode.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "singosc/errors.hpp"
#include "singosc/format.hpp"

namespace singosc::mode {

using Complex = std::complex<double>;

struct ConstantFrequency {
  double omega;
};

/// omega^2(t) = (1 + k cos 2t) / (1 + k). With normalized = false the 1/(1+k)
/// factor is dropped, which is the drive the analytic resonance mode solves to O(k).
struct ParametricResonance {
  double k;
  bool normalized = true;
};

/// omega^2 sampled at strictly increasing times and joined by a natural cubic
/// spline; held at the end values outside the table.
class TabulatedFrequency {
 public:
  TabulatedFrequency(std::vector<double> times, std::vector<double> omega_sq)
      : t_(std::move(times)), y_(std::move(omega_sq)) {
    if (t_.size() < 2 || t_.size() != y_.size()) {
      throw DomainError("tabulated profile needs >= 2 (time, omega^2) pairs of equal length");
    }
    for (std::size_t i = 1; i < t_.size(); ++i) {
      if (!(t_[i] > t_[i - 1])) throw DomainError("tabulated profile times must be strictly increasing");
    }
    if (!(y_.front() > 0.0) || !(y_.back() > 0.0)) {
      throw DomainError("tabulated profile must have positive omega^2 at both ends");
    }
    build_spline();
  }

  double operator()(double t) const {
    if (t <= t_.front()) return y_.front();
    if (t >= t_.back()) return y_.back();
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    const double h = t_[i + 1] - t_[i];
    const double a = (t_[i + 1] - t) / h, b = (t - t_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  }

  const std::vector<double>& times() const { return t_; }
  const std::vector<double>& omega_sq() const { return y_; }

 private:
  // Second derivatives of the natural spline (Thomas algorithm).
  void build_spline() {
    const std::size_t n = t_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = t_[i] - t_[i - 1], h1 = t_[i + 1] - t_[i];
      const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
      c[i] = h1 / diag;
      const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
      r[i] = (rhs - h0 * r[i - 1]) / diag;
    }
    for (std::size_t i = n - 2; i >= 1; --i) m_[i] = r[i] - c[i] * m_[i + 1];
  }

  std::vector<double> t_, y_, m_;
};

class FrequencyProfile {
 public:
  using Kind = std::variant<ConstantFrequency, TabulatedFrequency, ParametricResonance>;

  static FrequencyProfile constant(double omega) {
    if (!(omega > 0.0)) throw DomainError("constant profile: omega must be positive");
    return FrequencyProfile(ConstantFrequency{omega});
  }

  static FrequencyProfile tabulated(std::vector<double> times, std::vector<double> omega_sq) {
    return FrequencyProfile(TabulatedFrequency(std::move(times), std::move(omega_sq)));
  }

  static FrequencyProfile parametric_resonance(double k, bool normalized = true) {
    if (!(std::fabs(k) < 1.0)) throw DomainError("parametric resonance: |k| must be < 1");
    return FrequencyProfile(ParametricResonance{k, normalized});
  }

  double omega_sq(double t) const {
    return std::visit(
        [t](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, ConstantFrequency>) {
            return p.omega * p.omega;
          } else if constexpr (std::is_same_v<P, TabulatedFrequency>) {
            return p(t);
          } else {
            const double w2 = 1.0 + p.k * std::cos(2.0 * t);
            return p.normalized ? w2 / (1.0 + p.k) : w2;
          }
        },
        kind_);
  }

  /// Frequency in the remote past. The resonance drive has no settled value; its
  /// unperturbed base frequency 1 is used for both ends.
  double omega_initial() const { return end_omega(true); }
  double omega_final() const { return end_omega(false); }

  const Kind& kind() const { return kind_; }

 private:
  explicit FrequencyProfile(Kind k) : kind_(std::move(k)) {}

  double end_omega(bool initial) const {
    return std::visit(
        [initial](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, ConstantFrequency>) {
            return p.omega;
          } else if constexpr (std::is_same_v<P, TabulatedFrequency>) {
            return std::sqrt(initial ? p.omega_sq().front() : p.omega_sq().back());
          } else {
            return 1.0;
          }
        },
        kind_);
  }

  Kind kind_;
};

/// Tabulated tanh ramp of omega^2 from omega_i^2 to omega_f^2, centred at
/// duration/2 with width duration/16, sampled on [-duration/2, 3 duration/2].
inline FrequencyProfile smooth_ramp(double omega_i, double omega_f, double duration, int samples = 4001) {
  if (!(omega_i > 0.0) || !(omega_f > 0.0) || !(duration > 0.0) || samples < 2) {
    throw DomainError("smooth_ramp: frequencies and duration must be positive");
  }
  const double tau = duration / 16.0;
  const double lo = -0.5 * duration, hi = 1.5 * duration;
  std::vector<double> t(samples), w2(samples);
  for (int i = 0; i < samples; ++i) {
    t[i] = lo + (hi - lo) * i / (samples - 1);
    const double s = 0.5 * (1.0 + std::tanh((t[i] - 0.5 * duration) / tau));
    w2[i] = omega_i * omega_i + (omega_f * omega_f - omega_i * omega_i) * s;
  }
  return FrequencyProfile::tabulated(std::move(t), std::move(w2));
}

struct ModeState {
  double t = 0.0;
  Complex eps{1.0, 0.0};
  Complex eps_dot{0.0, 1.0};

  /// eps' conj(eps) - conj(eps') eps, equal to 2i for a normalized mode.
  Complex wronskian() const { return eps_dot * std::conj(eps) - std::conj(eps_dot) * eps; }
  double wronskian_drift() const { return std::abs(wronskian() - Complex(0.0, 2.0)); }
  double abs_eps_sq() const { return std::norm(eps); }
};

struct Trajectory {
  std::vector<ModeState> states;
  double max_wronskian_drift = 0.0;
};

struct BogoliubovPair {
  Complex xi{1.0, 0.0};
  Complex eta{0.0, 0.0};

  double normalization() const { return std::norm(xi) - std::norm(eta); }
};

/// eps = omega^{-1/2} e^{i omega t0}, eps' = i omega^{1/2} e^{i omega t0}.
inline ModeState initial_mode(double omega_i, double t0) {
  if (!(omega_i > 0.0)) throw DomainError("initial_mode: omega must be positive");
  const Complex phase = std::polar(1.0, omega_i * t0);
  return {t0, phase / std::sqrt(omega_i), Complex(0.0, std::sqrt(omega_i)) * phase};
}

/// Analytic approximate mode for the parametric resonance drive:
/// eps = cosh(kt/4) e^{it} - i sinh(kt/4) e^{-it}.
inline ModeState resonance_mode(double k, double t) {
  if (!(std::fabs(k) <= 0.1)) throw DomainError("resonance_mode: requires |k| <= 0.1");
  const double ch = std::cosh(k * t / 4.0), sh = std::sinh(k * t / 4.0);
  const Complex ep = std::polar(1.0, t), em = std::polar(1.0, -t);
  const Complex i(0.0, 1.0);
  const Complex eps = ch * ep - i * sh * em;
  const Complex eps_dot = (k / 4.0) * sh * ep + i * ch * ep - i * (k / 4.0) * ch * em - sh * em;
  return {t, eps, eps_dot};
}

namespace detail {

using State = std::array<double, 4>;

inline State pack(const ModeState& s) { return {s.eps.real(), s.eps.imag(), s.eps_dot.real(), s.eps_dot.imag()}; }

inline ModeState unpack(double t, const State& x) { return {t, {x[0], x[1]}, {x[2], x[3]}}; }

// Adaptive Dormand-Prince 5(4) from `start` to each time in `stops` (monotone in
// the direction of travel). `on_step` sees every accepted step; `on_stop` sees
// the state exactly at each stop.
template <class OnStep, class OnStop>
void drive(const FrequencyProfile& profile, const ModeState& start, const std::vector<double>& stops, double rel_tol,
           OnStep on_step, OnStop on_stop) {
  namespace odeint = boost::numeric::odeint;
  if (!(rel_tol >= 1e-13 && rel_tol <= 1e-6)) throw DomainError("integrate_mode: rel_tol must lie in [1e-13, 1e-6]");
  if (stops.empty()) return;

  auto rhs = [&profile](const State& x, State& dxdt, double t) {
    const double w2 = profile.omega_sq(t);
    dxdt[0] = x[2];
    dxdt[1] = x[3];
    dxdt[2] = -w2 * x[0];
    dxdt[3] = -w2 * x[1];
  };
  auto stepper = odeint::make_controlled(rel_tol, rel_tol, odeint::runge_kutta_dopri5<State>());

  const double span = std::fabs(stops.back() - start.t);
  const double dir = stops.back() >= start.t ? 1.0 : -1.0;
  const double min_step = std::max(span, 1.0) * 1e-13;
  double t = start.t;
  State x = pack(start);
  double dt = dir * std::min(0.01, std::max(span, 1e-300));

  for (double stop : stops) {
    if (dir * (stop - t) < 0.0) throw DomainError("integrate_mode: output times must be monotone");
    while (dir * (stop - t) > 0.0) {
      bool clamped = false;
      if (dir * (t + dt - stop) >= 0.0) {
        dt = stop - t;
        clamped = true;
      }
      const auto res = stepper.try_step(rhs, x, t, dt);
      if (res == odeint::fail) {
        if (std::fabs(dt) < min_step) {
          throw IntegrationError("integrate_mode: step size underflow at t = " + std::to_string(t));
        }
        continue;
      }
      if (clamped) t = stop;
      if (!(std::isfinite(x[0]) && std::isfinite(x[2]))) throw IntegrationError("integrate_mode: non-finite state");
      on_step(unpack(t, x));
    }
    on_stop(unpack(t, x));
  }
}

}  // namespace detail

/// Integrates from an arbitrary state to t_end (either direction) and returns
/// every accepted step, endpoints included.
inline Trajectory propagate(const FrequencyProfile& profile, const ModeState& start, double t_end, double rel_tol) {
  Trajectory out;
  out.states.push_back(start);
  out.max_wronskian_drift = start.wronskian_drift();
  detail::drive(
      profile, start, {t_end}, rel_tol,
      [&out](const ModeState& s) {
        out.states.push_back(s);
        out.max_wronskian_drift = std::max(out.max_wronskian_drift, s.wronskian_drift());
      },
      [](const ModeState&) {});
  return out;
}

/// Mode trajectory on [t0, t1] starting from the unexcited mode of omega_initial().
inline Trajectory integrate_mode(const FrequencyProfile& profile, double t0, double t1, double rel_tol) {
  if (!(t1 > t0)) throw DomainError("integrate_mode: requires t1 > t0");
  return propagate(profile, initial_mode(profile.omega_initial(), t0), t1, rel_tol);
}

/// Mode at each of the given nondecreasing times, starting from the unexcited mode at t0.
inline std::vector<ModeState> mode_at_times(const FrequencyProfile& profile, double t0, const std::vector<double>& times,
                                            double rel_tol) {
  std::vector<ModeState> out;
  out.reserve(times.size());
  if (times.empty()) return out;
  if (times.front() < t0) throw DomainError("mode_at_times: times must not precede t0");
  if (!std::is_sorted(times.begin(), times.end())) throw DomainError("mode_at_times: times must be sorted");
  detail::drive(
      profile, initial_mode(profile.omega_initial(), t0), times, rel_tol, [](const ModeState&) {},
      [&out](const ModeState& s) { out.push_back(s); });
  return out;
}

/// Decomposes a settled mode as omega_f^{-1/2}[xi e^{i w t} - eta e^{-i w t}].
inline BogoliubovPair bogoliubov(const ModeState& final, double omega_f) {
  if (!(omega_f > 0.0)) throw DomainError("bogoliubov: omega_f must be positive");
  const double sw = std::sqrt(omega_f);
  const Complex i(0.0, 1.0);
  const Complex a = sw * final.eps;
  const Complex b = final.eps_dot / sw;
  BogoliubovPair p;
  p.xi = std::polar(1.0, -omega_f * final.t) * (a - i * b) / 2.0;
  p.eta = -std::polar(1.0, omega_f * final.t) * (a + i * b) / 2.0;
  if (std::fabs(p.normalization() - 1.0) > 1e-6) {
    throw IntegrationError("bogoliubov: |xi|^2 - |eta|^2 deviates from 1 by " +
                           std::to_string(p.normalization() - 1.0));
  }
  return p;
}

/// r = |eta / xi|^2, in [0, 1) for a normalized pair.
inline double reflection_coefficient(const BogoliubovPair& pair) {
  if (!(std::abs(pair.xi) > 0.0)) throw DomainError("reflection_coefficient: xi must be nonzero");
  return std::norm(pair.eta) / std::norm(pair.xi);
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,re_eps,im_eps,re_eps_dot,im_eps_dot,abs_eps_sq,wronskian_drift\n";
  for (const auto& s : traj.states) {
    os << format_real(s.t) << ',' << format_real(s.eps.real()) << ',' << format_real(s.eps.imag()) << ','
       << format_real(s.eps_dot.real()) << ',' << format_real(s.eps_dot.imag()) << ',' << format_real(s.abs_eps_sq())
       << ',' << format_real(s.wronskian_drift()) << '\n';
  }
}

}  // namespace singosc::mode
