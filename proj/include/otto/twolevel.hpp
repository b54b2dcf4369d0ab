#ifndef OTTO_TWOLEVEL_HPP
#define OTTO_TWOLEVEL_HPP

// Driven spin H = eps [(lambda - cos theta) sigma_z + sin theta sigma_x] with
// lambda(t) = lambda~(t / tau) as the control parameter. Level splitting is
// 2 eps Lambda with Lambda = sqrt(lambda^2 - 2 lambda cos theta + 1).

#include <array>
#include <complex>
#include <utility>

#include "otto/core.hpp"
#include "otto/numerics.hpp"
#include "otto/schedule.hpp"

namespace otto::twolevel {

struct Params {
  double epsilon = 1.0;
  double theta = 0.4;

  // epsilon > 0, sin(theta) != 0.
  void validate() const;
};

// One finite-time adiabat starting from a thermal state at inverse
// temperature beta.
struct Adiabat {
  Params params;
  Schedule schedule;
  double beta;

  void validate() const;
};

enum class Level { Ground, Excited };

// Amplitudes in the instantaneous eigenbasis at s = 1, with the dynamical
// phase phi~(1) that was co-integrated alongside them.
struct AmplitudePair {
  std::complex<double> ground;
  std::complex<double> excited;
  double phase = 0.0;
  // Largest | |b_g|^2 + |b_e|^2 - 1 | seen over accepted steps.
  double max_norm_error = 0.0;
  numerics::OdeStats stats;
};

using Vec2 = std::array<double, 2>;

double gap(double lambda, double theta);

// Normalized instantaneous (ground, excited) eigenvectors in the sigma_z basis.
std::pair<Vec2, Vec2> eigenvectors(double lambda, double theta);

// eps * integral_0^s Lambda(lambda~(s')) ds'.
double dynamical_phase(const Adiabat& adiabat, double s);

AmplitudePair integrate_amplitudes(const Adiabat& adiabat, double tau,
                                   const numerics::IntegratorConfig& cfg = {},
                                   Level start = Level::Ground);

// 2 eps Lambda(1) tanh(beta eps Lambda(0)) |c_ge(tau)|^2.
double exact_extra_work(const Adiabat& adiabat, double tau,
                        const numerics::IntegratorConfig& cfg = {});

double quasistatic_work(const Adiabat& adiabat);

// First-order adiabatic amplitude c_ge^[1](tau) of the excited level.
std::complex<double> first_order_amplitude(const Adiabat& adiabat, double tau);

double mean_extra_work(const Adiabat& adiabat, double tau);
double osc_extra_work(const Adiabat& adiabat, double tau);

WorkBreakdown work_breakdown(const Adiabat& adiabat, double tau,
                             const numerics::IntegratorConfig& cfg = {});

Schedule special_schedule(double lambda0, double lambda1, double theta);

// Closed-form phi~(1) of the special protocol.
double special_phase_total(double lambda0, double lambda1, double theta, double epsilon);

QuasistaticCycle quasistatic_cycle(double lambda0, double lambda1, double theta,
                                   double epsilon, const BathPair& baths);

}  // namespace otto::twolevel

#endif  // OTTO_TWOLEVEL_HPP
