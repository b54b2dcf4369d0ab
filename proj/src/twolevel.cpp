#include "otto/twolevel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "otto/errors.hpp"

namespace otto::twolevel {

namespace {

using cplx = std::complex<double>;

void require_tau(double tau, const char* where) {
  if (!(tau > 0) || !std::isfinite(tau)) {
    throw DomainError(std::string(where) + ": control time must be positive and finite");
  }
}

// Largest splitting along the protocol, from a coarse scan plus endpoints.
double max_gap(const Adiabat& adiabat) {
  double result = 0.0;
  constexpr int kScan = 64;
  for (int i = 0; i <= kScan; ++i) {
    const double s = static_cast<double>(i) / kScan;
    result = std::max(result, gap(adiabat.schedule.value(s), adiabat.params.theta));
  }
  return result;
}

// p_g - p_e of the initial thermal state.
double population_imbalance(const Adiabat& adiabat) {
  const double eps = adiabat.params.epsilon;
  return std::tanh(adiabat.beta * eps * gap(adiabat.schedule.start(), adiabat.params.theta));
}

struct EndpointData {
  double gap0, gap1;
  double slope0, slope1;
};

EndpointData endpoints(const Adiabat& adiabat) {
  const auto& sched = adiabat.schedule;
  const double theta = adiabat.params.theta;
  return {gap(sched.start(), theta), gap(sched.end(), theta), sched.derivative(0.0),
          sched.derivative(1.0)};
}

}  // namespace

void Params::validate() const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw DomainError("twolevel::Params: epsilon must be positive and finite");
  }
  if (!std::isfinite(theta) || std::sin(theta) == 0.0) {
    throw DomainError("twolevel::Params: sin(theta) must be nonzero");
  }
}

void Adiabat::validate() const {
  params.validate();
  if (!(beta > 0) || !std::isfinite(beta)) {
    throw DomainError("twolevel::Adiabat: beta must be positive and finite");
  }
}

double gap(double lambda, double theta) {
  return std::sqrt(lambda * lambda - 2.0 * lambda * std::cos(theta) + 1.0);
}

std::pair<Vec2, Vec2> eigenvectors(double lambda, double theta) {
  const double u = lambda - std::cos(theta);
  const double v = std::sin(theta);
  const double big = gap(lambda, theta);
  // u - Lambda and u + Lambda without cancellation: (u - L)(u + L) = -v^2.
  double g0 = 0.0;
  double e0 = 0.0;
  if (u >= 0) {
    e0 = u + big;
    g0 = e0 > 0 ? -v * v / e0 : 0.0;
  } else {
    g0 = u - big;
    e0 = -v * v / g0;
  }
  const double ng = std::hypot(g0, v);
  const double ne = std::hypot(e0, v);
  if (!(ng > 0) || !(ne > 0)) {
    throw DomainError("twolevel::eigenvectors: degenerate point (sin theta = 0, lambda = cos theta)");
  }
  if (v == 0.0) {
    throw DomainError("twolevel::eigenvectors: sin(theta) = 0 leaves a normalization factor zero");
  }
  return {Vec2{g0 / ng, v / ng}, Vec2{e0 / ne, v / ne}};
}

double dynamical_phase(const Adiabat& adiabat, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("twolevel::dynamical_phase: s outside [0, 1]");
  const double eps = adiabat.params.epsilon;
  const double theta = adiabat.params.theta;
  const auto& sched = adiabat.schedule;
  return numerics::quad([&](double x) { return eps * gap(sched.value(x), theta); }, 0.0, s);
}

AmplitudePair integrate_amplitudes(const Adiabat& adiabat, double tau,
                                   const numerics::IntegratorConfig& cfg, Level start) {
  adiabat.params.validate();
  require_tau(tau, "twolevel::integrate_amplitudes");
  const double eps = adiabat.params.epsilon;
  const double theta = adiabat.params.theta;
  const double abs_sin = std::abs(std::sin(theta));
  const auto& sched = adiabat.schedule;

  // State: (b_g, b_e, phi~) with the phase carried in the real part.
  auto rhs = [&](double s, std::span<const cplx> y, std::span<cplx> dy) {
    const double lambda = sched.value(s);
    const double big = gap(lambda, theta);
    const double coupling = abs_sin * sched.derivative(s) / (2.0 * big * big);
    const cplx rot = std::polar(1.0, 2.0 * tau * y[2].real());
    dy[0] = std::conj(rot) * coupling * y[1];
    dy[1] = -rot * coupling * y[0];
    dy[2] = eps * big;
  };

  std::vector<cplx> y0 = start == Level::Ground ? std::vector<cplx>{1.0, 0.0, 0.0}
                                                : std::vector<cplx>{0.0, 1.0, 0.0};
  // Resolve the phase factor exp(2 i tau phi~): its period in s is
  // pi / (tau eps Lambda).
  const double max_step = std::numbers::pi / (tau * eps * max_gap(adiabat)) / 10.0;

  double max_norm_error = 0.0;
  auto observer = [&](double, std::span<const cplx> y) {
    const double norm = std::norm(y[0]) + std::norm(y[1]);
    max_norm_error = std::max(max_norm_error, std::abs(norm - 1.0));
  };

  auto result = numerics::integrate_ode<cplx>(rhs, std::move(y0), {0.0, 1.0}, cfg, max_step,
                                              observer);
  return AmplitudePair{result.y[0], result.y[1], result.y[2].real(), max_norm_error,
                       result.stats};
}

double exact_extra_work(const Adiabat& adiabat, double tau,
                        const numerics::IntegratorConfig& cfg) {
  adiabat.validate();
  const auto amps = integrate_amplitudes(adiabat, tau, cfg, Level::Ground);
  const double eps = adiabat.params.epsilon;
  const double gap1 = gap(adiabat.schedule.end(), adiabat.params.theta);
  return 2.0 * eps * gap1 * population_imbalance(adiabat) * std::norm(amps.excited);
}

double quasistatic_work(const Adiabat& adiabat) {
  const auto ep = endpoints(adiabat);
  return -adiabat.params.epsilon * population_imbalance(adiabat) * (ep.gap1 - ep.gap0);
}

std::complex<double> first_order_amplitude(const Adiabat& adiabat, double tau) {
  adiabat.params.validate();
  require_tau(tau, "twolevel::first_order_amplitude");
  const auto ep = endpoints(adiabat);
  const double eps = adiabat.params.epsilon;
  const double abs_sin = std::abs(std::sin(adiabat.params.theta));
  const double phase = dynamical_phase(adiabat, 1.0);
  const cplx bracket = ep.slope1 / std::pow(ep.gap1, 3) * std::polar(1.0, 2.0 * tau * phase) -
                       ep.slope0 / std::pow(ep.gap0, 3);
  return cplx(0.0, abs_sin / (4.0 * eps * tau)) * bracket;
}

double mean_extra_work(const Adiabat& adiabat, double tau) {
  adiabat.params.validate();
  require_tau(tau, "twolevel::mean_extra_work");
  const auto ep = endpoints(adiabat);
  const double eps = adiabat.params.epsilon;
  const double sin_t = std::sin(adiabat.params.theta);
  const double ends = ep.slope1 * ep.slope1 / std::pow(ep.gap1, 6) +
                      ep.slope0 * ep.slope0 / std::pow(ep.gap0, 6);
  return sin_t * sin_t * ep.gap1 / (8.0 * eps * tau * tau) * ends *
         population_imbalance(adiabat);
}

double osc_extra_work(const Adiabat& adiabat, double tau) {
  adiabat.params.validate();
  require_tau(tau, "twolevel::osc_extra_work");
  const auto ep = endpoints(adiabat);
  const double eps = adiabat.params.epsilon;
  const double sin_t = std::sin(adiabat.params.theta);
  const double phase = dynamical_phase(adiabat, 1.0);
  return -sin_t * sin_t / (4.0 * eps * tau * tau) * ep.slope1 * ep.slope0 *
         std::cos(2.0 * tau * phase) / (ep.gap1 * ep.gap1 * std::pow(ep.gap0, 3)) *
         population_imbalance(adiabat);
}

WorkBreakdown work_breakdown(const Adiabat& adiabat, double tau,
                             const numerics::IntegratorConfig& cfg) {
  return WorkBreakdown{tau, quasistatic_work(adiabat), exact_extra_work(adiabat, tau, cfg),
                       mean_extra_work(adiabat, tau), osc_extra_work(adiabat, tau)};
}

Schedule special_schedule(double lambda0, double lambda1, double theta) {
  return Schedule::special_two_level(lambda0, lambda1, theta);
}

double special_phase_total(double lambda0, double lambda1, double theta, double epsilon) {
  Params{epsilon, theta}.validate();
  const double c = std::cos(theta);
  const double v = std::sin(theta);
  if (std::abs(lambda1 - lambda0) <= 1e-9 * (1.0 + std::abs(lambda0))) {
    // Constant integrand limit.
    return epsilon * gap(0.5 * (lambda0 + lambda1), theta);
  }
  // arctan((lambda - cos theta) / sin theta) has the same derivative as the
  // tan(theta/2) form but no branch cut at lambda = 1.
  const double angle = std::atan((lambda1 - c) / v) - std::atan((lambda0 - c) / v);
  const double f_diff = (lambda1 - c) / gap(lambda1, theta) - (lambda0 - c) / gap(lambda0, theta);
  return epsilon * v * angle / f_diff;
}

QuasistaticCycle quasistatic_cycle(double lambda0, double lambda1, double theta,
                                   double epsilon, const BathPair& baths) {
  Params{epsilon, theta}.validate();
  const double e0 = epsilon * gap(lambda0, theta);
  const double e1 = epsilon * gap(lambda1, theta);
  const double bracket = std::tanh(baths.beta_cold() * e1) - std::tanh(baths.beta_hot() * e0);
  if (!(bracket > 0)) {
    throw DomainError("twolevel::quasistatic_cycle: not an engine, tanh(beta_c E1) - "
                      "tanh(beta_h E0) = " + std::to_string(bracket) + " <= 0");
  }
  if (e1 > e0) {
    throw DomainError("twolevel::quasistatic_cycle: not an engine, E1 = " + std::to_string(e1) +
                      " exceeds E0 = " + std::to_string(e0));
  }
  const double w = (e0 - e1) * bracket;
  const double q = e0 * bracket;
  return QuasistaticCycle{w, q, 1.0 - e1 / e0};
}

}  // namespace otto::twolevel
