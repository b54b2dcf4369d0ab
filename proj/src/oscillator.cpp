#include "otto/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "otto/errors.hpp"

namespace otto::oscillator {

namespace {

using cplx = std::complex<double>;

// Population allowed in the highest retained level before the ladder is
// considered truncated.
constexpr double kTailTolerance = 1e-12;
constexpr double kNormTolerance = 1e-8;

void require_tau(double tau, const char* where) {
  if (!(tau > 0) || !std::isfinite(tau)) {
    throw DomainError(std::string(where) + ": control time must be positive and finite");
  }
}

double coth(double x) { return 1.0 / std::tanh(x); }

double max_frequency(const Schedule& sched) {
  double result = 0.0;
  constexpr int kScan = 64;
  for (int i = 0; i <= kScan; ++i) {
    result = std::max(result, sched.value(static_cast<double>(i) / kScan));
  }
  return result;
}

struct LadderRun {
  FockLadder ladder;
  double tail = 0.0;  // population of the top retained level of n's parity
};

LadderRun run_ladder(const Adiabat& adiabat, double tau, int n_init, int cutoff,
                     const numerics::IntegratorConfig& cfg) {
  const auto& sched = adiabat.schedule;
  const std::size_t levels = static_cast<std::size_t>(cutoff) + 1;
  std::vector<double> down(levels, 0.0), up(levels, 0.0);
  for (std::size_t l = 0; l < levels; ++l) {
    const double ld = static_cast<double>(l);
    down[l] = std::sqrt(ld * (ld - 1.0));        // couples l to l - 2
    up[l] = std::sqrt((ld + 1.0) * (ld + 2.0));  // couples l to l + 2
  }

  // db_l/ds = r [ sqrt(l(l-1)) e^{2 i tau phi} b_{l-2}
  //             - sqrt((l+1)(l+2)) e^{-2 i tau phi} b_{l+2} ],
  // r = omega'/(4 omega); the last entry carries phi~ in its real part.
  auto rhs = [&](double s, std::span<const cplx> y, std::span<cplx> dy) {
    const double w = sched.value(s);
    const double r = sched.derivative(s) / (4.0 * w);
    const cplx rot = std::polar(1.0, 2.0 * tau * y[levels].real());
    const cplx rot_c = std::conj(rot);
    for (std::size_t l = 0; l < levels; ++l) {
      cplx acc = 0.0;
      if (l >= 2) acc += down[l] * rot * y[l - 2];
      if (l + 2 < levels) acc -= up[l] * rot_c * y[l + 2];
      dy[l] = r * acc;
    }
    dy[levels] = w;
  };

  std::vector<cplx> y0(levels + 1, 0.0);
  y0[static_cast<std::size_t>(n_init)] = 1.0;
  const double max_step = std::numbers::pi / (tau * max_frequency(sched)) / 10.0;
  auto result = numerics::integrate_ode<cplx>(rhs, std::move(y0), {0.0, 1.0}, cfg, max_step);

  LadderRun run;
  run.ladder.n_init = n_init;
  run.ladder.cutoff = cutoff;
  run.ladder.phase = result.y[levels].real();
  run.ladder.stats = result.stats;
  result.y.pop_back();
  run.ladder.amplitudes = std::move(result.y);
  const int top = (cutoff - n_init) % 2 == 0 ? cutoff : cutoff - 1;
  run.tail = std::norm(run.ladder.amplitudes[static_cast<std::size_t>(top)]);
  return run;
}

struct EndpointData {
  double w0, w1;
  double slope0, slope1;
};

EndpointData endpoints(const Adiabat& adiabat) {
  const auto& sched = adiabat.schedule;
  return {sched.start(), sched.end(), sched.derivative(0.0), sched.derivative(1.0)};
}

}  // namespace

void Adiabat::validate() const {
  if (!(beta > 0) || !std::isfinite(beta)) {
    throw DomainError("oscillator::Adiabat: beta must be positive and finite");
  }
  if (!(mass > 0) || !std::isfinite(mass)) {
    throw DomainError("oscillator::Adiabat: mass must be positive and finite");
  }
  constexpr int kScan = 64;
  for (int i = 0; i <= kScan; ++i) {
    const double s = static_cast<double>(i) / kScan;
    if (!(schedule.value(s) > 0)) {
      throw DomainError("oscillator::Adiabat: frequency must stay positive (fails at s = " +
                        std::to_string(s) + ")");
    }
  }
}

double FockLadder::norm() const {
  double total = 0.0;
  for (const auto& b : amplitudes) total += std::norm(b);
  return total;
}

double thermal_mean_quanta(double beta, double omega0) { return 0.5 * coth(0.5 * beta * omega0); }

double thermal_weight(double beta, double omega0, int n) {
  const double x = beta * omega0;
  return -std::expm1(-x) * std::exp(-static_cast<double>(n) * x);
}

int thermal_cutoff(double beta, double omega0) {
  const double target = 1e-10 * thermal_mean_quanta(beta, omega0);
  int n = 0;
  while (thermal_weight(beta, omega0, n) * (n + 0.5) >= target) {
    ++n;
    if (n > 1'000'000) throw NumericalError("thermal_cutoff: temperature too high for truncation");
  }
  return n;
}

int ladder_cutoff(int n_init) {
  return n_init + 2 * static_cast<int>(std::ceil(4.0 + 2.0 * std::sqrt(n_init + 1.0)));
}

ErmakovState ermakov_integrate(const Adiabat& adiabat, double tau,
                               const numerics::IntegratorConfig& cfg) {
  adiabat.validate();
  require_tau(tau, "oscillator::ermakov_integrate");
  const auto& sched = adiabat.schedule;
  const double w0_sq = sched.start() * sched.start();

  // c'' + omega(t)^2 c = omega(0)^2 / c^3 in physical time.
  auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    if (!(y[0] > 0)) {
      throw NumericalError("ermakov_integrate: c <= 0 at t = " + std::to_string(t));
    }
    const double w = sched.value(t / tau);
    const double c3 = y[0] * y[0] * y[0];
    dy[0] = y[1];
    dy[1] = -w * w * y[0] + w0_sq / c3;
  };
  const double max_step = std::numbers::pi / max_frequency(sched) / 10.0;
  auto result = numerics::integrate_ode<double>(rhs, {1.0, 0.0}, {0.0, tau}, cfg, max_step);
  if (!(result.y[0] > 0)) throw NumericalError("ermakov_integrate: c <= 0 at t = tau");
  return ErmakovState{result.y[0], result.y[1]};
}

double ermakov_error_estimate(const Adiabat& adiabat, double tau,
                              const numerics::IntegratorConfig& cfg) {
  auto tight = cfg;
  tight.rel_tol /= 100.0;
  tight.abs_tol /= 100.0;
  tight.max_steps *= 4;
  const auto coarse = ermakov_integrate(adiabat, tau, cfg);
  const auto fine = ermakov_integrate(adiabat, tau, tight);
  return std::abs(coarse.c_dot - fine.c_dot);
}

double nonadiabatic_factor(const Adiabat& adiabat, double tau,
                           const numerics::IntegratorConfig& cfg) {
  const auto st = ermakov_integrate(adiabat, tau, cfg);
  const double w0 = adiabat.schedule.start();
  const double w1 = adiabat.schedule.end();
  return (st.c_dot * st.c_dot + w1 * w1 * st.c * st.c + w0 * w0 / (st.c * st.c)) /
         (2.0 * w1 * w0);
}

double exact_extra_work(const Adiabat& adiabat, double tau,
                        const numerics::IntegratorConfig& cfg) {
  const double n = nonadiabatic_factor(adiabat, tau, cfg);
  const double w0 = adiabat.schedule.start();
  const double w1 = adiabat.schedule.end();
  return 0.5 * w1 * (n - 1.0) * coth(0.5 * adiabat.beta * w0);
}

double quasistatic_work(const Adiabat& adiabat) {
  const double w0 = adiabat.schedule.start();
  const double w1 = adiabat.schedule.end();
  return 0.5 * (w1 - w0) * coth(0.5 * adiabat.beta * w0);
}

FockLadder fock_integrate(const Adiabat& adiabat, double tau, int n_init, int cutoff,
                          const numerics::IntegratorConfig& cfg) {
  adiabat.validate();
  require_tau(tau, "oscillator::fock_integrate");
  if (n_init < 0) throw DomainError("fock_integrate: n_init must be >= 0");
  if (cutoff < n_init + 2) {
    throw DomainError("fock_integrate: cutoff must be at least n_init + 2");
  }
  auto run = run_ladder(adiabat, tau, n_init, cutoff, cfg);
  if (run.tail > kTailTolerance) {
    throw NumericalError("fock_integrate: population " + std::to_string(run.tail) +
                         " reaches the top retained level " + std::to_string(cutoff) +
                         "; increase the cutoff");
  }
  const double norm_error = std::abs(run.ladder.norm() - 1.0);
  if (norm_error > kNormTolerance) {
    throw NumericalError("fock_integrate: norm deficit " + std::to_string(norm_error) +
                         " exceeds " + std::to_string(kNormTolerance));
  }
  return std::move(run.ladder);
}

double extra_work_fock(const Adiabat& adiabat, double tau, const FockOptions& options,
                       const numerics::IntegratorConfig& cfg) {
  adiabat.validate();
  require_tau(tau, "oscillator::extra_work_fock");
  const double w0 = adiabat.schedule.start();
  const double w1 = adiabat.schedule.end();
  const int n_max =
      options.cutoff_thermal > 0 ? options.cutoff_thermal : thermal_cutoff(adiabat.beta, w0);

  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double p = thermal_weight(adiabat.beta, w0, n);
    int buffer = options.ladder_buffer > 0 ? options.ladder_buffer : ladder_cutoff(n) - n;
    LadderRun run;
    for (int attempt = 0;; ++attempt) {
      run = run_ladder(adiabat, tau, n, n + buffer, cfg);
      if (run.tail <= kTailTolerance) break;
      if (attempt == 4) {
        throw NumericalError("extra_work_fock: ladder still truncated at cutoff " +
                             std::to_string(n + buffer) + " for n = " + std::to_string(n));
      }
      buffer *= 2;
    }
    double level_work = 0.0;
    for (std::size_t m = 0; m < run.ladder.amplitudes.size(); ++m) {
      level_work += std::norm(run.ladder.amplitudes[m]) * (static_cast<double>(m) - n) * w1;
    }
    total += p * level_work;
  }
  return total;
}

double dynamical_phase(const Adiabat& adiabat, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("oscillator::dynamical_phase: s outside [0, 1]");
  const auto& sched = adiabat.schedule;
  return numerics::quad([&](double x) { return sched.value(x); }, 0.0, s);
}

std::pair<std::complex<double>, std::complex<double>> first_order_fock_amplitudes(
    const Adiabat& adiabat, double tau, int n) {
  require_tau(tau, "oscillator::first_order_fock_amplitudes");
  if (n < 0) throw DomainError("first_order_fock_amplitudes: n must be >= 0");
  const auto ep = endpoints(adiabat);
  const double end_ratio = ep.slope1 / (ep.w1 * ep.w1);
  const double start_ratio = ep.slope0 / (ep.w0 * ep.w0);
  const double phase = dynamical_phase(adiabat, 1.0);
  const double nd = static_cast<double>(n);
  const cplx up = cplx(0.0, -std::sqrt((nd + 1.0) * (nd + 2.0)) / (8.0 * tau)) *
                  (end_ratio * std::polar(1.0, 2.0 * tau * phase) - start_ratio);
  cplx down = 0.0;
  if (n >= 2) {
    down = cplx(0.0, -std::sqrt(nd * (nd - 1.0)) / (8.0 * tau)) *
           (end_ratio * std::polar(1.0, -2.0 * tau * phase) - start_ratio);
  }
  return {up, down};
}

double mean_extra_work(const Adiabat& adiabat, double tau) {
  require_tau(tau, "oscillator::mean_extra_work");
  const auto ep = endpoints(adiabat);
  const double ends = ep.slope0 * ep.slope0 / std::pow(ep.w0, 4) +
                      ep.slope1 * ep.slope1 / std::pow(ep.w1, 4);
  return ep.w1 / (8.0 * tau * tau) * ends * thermal_mean_quanta(adiabat.beta, ep.w0);
}

double osc_extra_work(const Adiabat& adiabat, double tau) {
  require_tau(tau, "oscillator::osc_extra_work");
  const auto ep = endpoints(adiabat);
  const double phase = dynamical_phase(adiabat, 1.0);
  return -std::cos(2.0 * tau * phase) / (4.0 * tau * tau) * ep.slope0 * ep.slope1 /
         (ep.w0 * ep.w0 * ep.w1) * thermal_mean_quanta(adiabat.beta, ep.w0);
}

WorkBreakdown work_breakdown(const Adiabat& adiabat, double tau,
                             const numerics::IntegratorConfig& cfg) {
  return WorkBreakdown{tau, quasistatic_work(adiabat), exact_extra_work(adiabat, tau, cfg),
                       mean_extra_work(adiabat, tau), osc_extra_work(adiabat, tau)};
}

Schedule special_schedule(double omega0, double omega1) {
  return Schedule::special_oscillator(omega0, omega1);
}

double special_phase_total(double omega0, double omega1) {
  if (!(omega0 > 0) || !(omega1 > 0)) {
    throw DomainError("special_phase_total: frequencies must be positive");
  }
  if (std::abs(omega1 - omega0) <= 1e-9 * omega0) return 0.5 * (omega0 + omega1);
  return (std::log(omega0) - std::log(omega1)) / (1.0 / omega1 - 1.0 / omega0);
}

QuasistaticCycle quasistatic_cycle(double omega0, double omega1, const BathPair& baths) {
  if (!(omega0 > 0) || !(omega1 > 0)) {
    throw DomainError("oscillator::quasistatic_cycle: frequencies must be positive");
  }
  const double bracket = coth(0.5 * baths.beta_hot() * omega0) - coth(0.5 * baths.beta_cold() * omega1);
  if (!(bracket > 0)) {
    throw DomainError("oscillator::quasistatic_cycle: not an engine, coth(beta_h w0/2) - "
                      "coth(beta_c w1/2) = " + std::to_string(bracket) + " <= 0");
  }
  if (omega1 > omega0) {
    throw DomainError("oscillator::quasistatic_cycle: not an engine, omega1 exceeds omega0");
  }
  // Q_h = <H>_1 - <H>_4 = (omega0 / 2) * bracket.
  return QuasistaticCycle{0.5 * (omega0 - omega1) * bracket, 0.5 * omega0 * bracket,
                          1.0 - omega1 / omega0};
}

double power_exact(double omega0, double omega1, const BathPair& baths, double n1, double n3,
                   double tau1, double tau3) {
  if (!(tau1 > 0) || !(tau3 > 0)) throw DomainError("power_exact: control times must be positive");
  if (!(n1 >= 1.0 - 1e-9) || !(n3 >= 1.0 - 1e-9)) {
    throw DomainError("power_exact: non-adiabatic factors must be >= 1");
  }
  const double ch = coth(0.5 * baths.beta_hot() * omega0);
  const double cc = coth(0.5 * baths.beta_cold() * omega1);
  return ((omega0 - omega1 * n1) * ch + (omega1 - omega0 * n3) * cc) / (2.0 * (tau1 + tau3));
}

double efficiency_exact(double omega0, double omega1, const BathPair& baths, double n1,
                        double n3) {
  if (!(n1 >= 1.0 - 1e-9) || !(n3 >= 1.0 - 1e-9)) {
    throw DomainError("efficiency_exact: non-adiabatic factors must be >= 1");
  }
  const double ch = coth(0.5 * baths.beta_hot() * omega0);
  const double cc = coth(0.5 * baths.beta_cold() * omega1);
  const double denominator = omega0 * (ch - n3 * cc);
  if (!(denominator > 0)) {
    throw DomainError("efficiency_exact: heat absorbed from the hot bath is not positive");
  }
  return 1.0 - omega1 * (n1 * ch - cc) / denominator;
}

}  // namespace otto::oscillator
