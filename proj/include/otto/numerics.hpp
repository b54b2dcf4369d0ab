#ifndef OTTO_NUMERICS_HPP
#define OTTO_NUMERICS_HPP

// Adaptive Dormand-Prince 5(4) integration over real or complex state
// vectors, adaptive Gauss-Kronrod quadrature and bracketed bisection.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "otto/errors.hpp"

namespace otto::numerics {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_steps = 2'000'000;
  // First trial step as a fraction of the integration interval.
  double initial_step = 1e-3;

  void validate() const;
};

struct Interval {
  double begin;
  double end;
  double length() const { return end - begin; }
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  double last_step = 0.0;
};

template <typename T>
struct OdeResult {
  std::vector<T> y;
  OdeStats stats;
};

namespace detail {

inline bool is_finite(double v) { return std::isfinite(v); }
inline bool is_finite(const std::complex<double>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

struct NoObserver {
  template <typename T>
  void operator()(double, std::span<const T>) const {}
};

// Dormand-Prince tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                        e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

// Integrates dy/dt = rhs(t, y) from span.begin to span.end (either direction).
//
// rhs has signature void(double t, std::span<const T> y, std::span<T> dydt).
// The observer is called with (t, y) at the start and after every accepted
// step. max_step bounds |h|; callers use it to resolve oscillatory phase
// factors that the error estimate alone can step over.
template <typename T, typename Rhs, typename Observer = detail::NoObserver>
OdeResult<T> integrate_ode(Rhs&& rhs, std::vector<T> y0, Interval span,
                           const IntegratorConfig& cfg = {},
                           double max_step = std::numeric_limits<double>::infinity(),
                           Observer&& observer = {}) {
  using namespace detail;
  cfg.validate();
  const std::size_t n = y0.size();
  OdeResult<T> result{std::move(y0), {}};
  auto& y = result.y;
  auto& stats = result.stats;

  const double total = span.length();
  observer(span.begin, std::span<const T>(y));
  if (total == 0.0 || n == 0) return result;

  const double dir = total > 0 ? 1.0 : -1.0;
  const double abs_total = std::abs(total);
  max_step = std::min(max_step, abs_total);
  if (!(max_step > 0)) throw DomainError("integrate_ode: max_step must be positive");

  std::array<std::vector<T>, 7> k;
  for (auto& v : k) v.assign(n, T{});
  std::vector<T> stage(n), y_new(n);

  auto eval = [&](double t, const std::vector<T>& state, std::vector<T>& out) {
    rhs(t, std::span<const T>(state), std::span<T>(out));
    ++stats.evaluations;
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_finite(out[i])) {
        throw NumericalError("integrate_ode: non-finite derivative at t=" +
                             std::to_string(t) + " (component " +
                             std::to_string(i) + ")");
      }
    }
  };

  double t = span.begin;
  double h = std::min(std::max(cfg.initial_step * abs_total, 1e-14 * abs_total), max_step);
  eval(t, y, k[0]);

  while (true) {
    const double remaining = span.end - t;
    if (dir * remaining <= 0) break;
    bool last = false;
    if (h >= std::abs(remaining)) {
      h = std::abs(remaining);
      last = true;
    }
    if (stats.accepted + stats.rejected >= cfg.max_steps) {
      throw NumericalError("integrate_ode: max_steps (" + std::to_string(cfg.max_steps) +
                           ") exceeded at t=" + std::to_string(t) +
                           " with step " + std::to_string(h));
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw NumericalError("integrate_ode: step size underflow at t=" + std::to_string(t));
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + hs * (a21 * k[0][i]);
    eval(t + c2 * hs, stage, k[1]);
    for (std::size_t i = 0; i < n; ++i)
      stage[i] = y[i] + hs * (a31 * k[0][i] + a32 * k[1][i]);
    eval(t + c3 * hs, stage, k[2]);
    for (std::size_t i = 0; i < n; ++i)
      stage[i] = y[i] + hs * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
    eval(t + c4 * hs, stage, k[3]);
    for (std::size_t i = 0; i < n; ++i)
      stage[i] = y[i] + hs * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] +
                              a54 * k[3][i]);
    eval(t + c5 * hs, stage, k[4]);
    for (std::size_t i = 0; i < n; ++i)
      stage[i] = y[i] + hs * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] +
                              a64 * k[3][i] + a65 * k[4][i]);
    const double t_new = last ? span.end : t + hs;
    eval(t + hs, stage, k[5]);
    for (std::size_t i = 0; i < n; ++i)
      y_new[i] = y[i] + hs * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] +
                              b5 * k[4][i] + b6 * k[5][i]);
    eval(t_new, y_new, k[6]);

    double err_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const T err = hs * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] +
                          e5 * k[4][i] + e6 * k[5][i] + e7 * k[6][i]);
      const double scale =
          cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double r = std::abs(err) / scale;
      err_sq += r * r;
    }
    const double err = std::sqrt(err_sq / static_cast<double>(n));

    if (err <= 1.0) {
      ++stats.accepted;
      stats.last_step = h;
      t = t_new;
      std::swap(y, y_new);
      std::swap(k[0], k[6]);
      observer(t, std::span<const T>(y));
      if (last) break;
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(h * fac, max_step);
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
  return result;
}

struct QuadConfig {
  double rel_tol = 1e-10;
  unsigned max_depth = 20;
};

// Adaptive 15-point Gauss-Kronrod quadrature of f over [a, b].
double quad(const std::function<double(double)>& f, double a, double b,
            const QuadConfig& cfg = {});

// Bisection on a sign-changing bracket until the bracket is narrower than tol.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-12);

}  // namespace otto::numerics

#endif  // OTTO_NUMERICS_HPP
