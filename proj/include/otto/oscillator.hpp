#ifndef OTTO_OSCILLATOR_HPP
#define OTTO_OSCILLATOR_HPP

// Harmonic oscillator with a ramped frequency omega(t) = omega~(t / tau).
//
// Two independent exact routes are provided: the Ermakov scalar c(t), which
// gives the non-adiabatic factor N(tau) in closed form for thermal initial
// states, and direct propagation of the instantaneous-eigenbasis amplitudes
// on a truncated Fock ladder.

#include <complex>
#include <utility>
#include <vector>

#include "otto/core.hpp"
#include "otto/numerics.hpp"
#include "otto/schedule.hpp"

namespace otto::oscillator {

struct Adiabat {
  Schedule schedule;  // omega~(s), energy units
  double beta;
  // Enters the eigenfunctions only; every observable here is independent of it.
  double mass = 1.0;

  void validate() const;
};

struct ErmakovState {
  double c = 1.0;
  double c_dot = 0.0;
};

// Amplitudes b_{n,m}(1) for the initial level n_init, indexed by m = 0..cutoff.
// Entries with m - n_init odd are never coupled and stay exactly zero.
struct FockLadder {
  int n_init = 0;
  int cutoff = 0;
  std::vector<std::complex<double>> amplitudes;
  double phase = 0.0;
  numerics::OdeStats stats;

  double norm() const;
};

struct FockOptions {
  // Highest initial level in the thermal sum; 0 selects it automatically.
  int cutoff_thermal = 0;
  // Extra same-parity levels above n; 0 selects n-dependent default.
  int ladder_buffer = 0;
};

// Sum_n (n + 1/2) p_n = coth(beta omega0 / 2) / 2.
double thermal_mean_quanta(double beta, double omega0);

// Thermal weight p_n = 2 sinh(beta omega0 / 2) exp(-beta (n + 1/2) omega0).
double thermal_weight(double beta, double omega0, int n);

// Smallest N with p_N (N + 1/2) omega0 < 1e-10 * omega0 * Sum (n + 1/2) p_n.
int thermal_cutoff(double beta, double omega0);

// Default number of retained levels for an initial level n.
int ladder_cutoff(int n_init);

ErmakovState ermakov_integrate(const Adiabat& adiabat, double tau,
                               const numerics::IntegratorConfig& cfg = {});

// |c_dot(tau)| difference between the configured run and one with tolerances
// tightened a hundredfold.
double ermakov_error_estimate(const Adiabat& adiabat, double tau,
                              const numerics::IntegratorConfig& cfg = {});

double nonadiabatic_factor(const Adiabat& adiabat, double tau,
                           const numerics::IntegratorConfig& cfg = {});

// omega~(1) / 2 (N - 1) coth(beta omega~(0) / 2).
double exact_extra_work(const Adiabat& adiabat, double tau,
                        const numerics::IntegratorConfig& cfg = {});

double quasistatic_work(const Adiabat& adiabat);

FockLadder fock_integrate(const Adiabat& adiabat, double tau, int n_init, int cutoff,
                          const numerics::IntegratorConfig& cfg = {});

// Sum_{n,m} p_n |c_nm|^2 (E_m(1) - E_n(1)) over the truncated ladder.
double extra_work_fock(const Adiabat& adiabat, double tau, const FockOptions& options = {},
                       const numerics::IntegratorConfig& cfg = {});

// (c_{n,n+2}^[1], c_{n,n-2}^[1]).
std::pair<std::complex<double>, std::complex<double>> first_order_fock_amplitudes(
    const Adiabat& adiabat, double tau, int n);

double dynamical_phase(const Adiabat& adiabat, double s);

double mean_extra_work(const Adiabat& adiabat, double tau);
double osc_extra_work(const Adiabat& adiabat, double tau);

WorkBreakdown work_breakdown(const Adiabat& adiabat, double tau,
                             const numerics::IntegratorConfig& cfg = {});

Schedule special_schedule(double omega0, double omega1);

// [ln omega0 - ln omega1] / [1 / omega1 - 1 / omega0].
double special_phase_total(double omega0, double omega1);

QuasistaticCycle quasistatic_cycle(double omega0, double omega1, const BathPair& baths);

// Closed-form cycle power and efficiency in terms of the two strokes'
// non-adiabatic factors.
double power_exact(double omega0, double omega1, const BathPair& baths, double n1, double n3,
                   double tau1, double tau3);
double efficiency_exact(double omega0, double omega1, const BathPair& baths, double n1,
                        double n3);

}  // namespace otto::oscillator

#endif  // OTTO_OSCILLATOR_HPP
