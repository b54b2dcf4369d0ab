#ifndef OTTO_ENGINE_HPP
#define OTTO_ENGINE_HPP

// Finite-time Otto cycles for either working medium: stroke 1->2 ramps the
// control parameter R0 -> R1 starting from a thermal state at beta_h, stroke
// 3->4 runs the reversed protocol starting from beta_c. Isochores are
// instantaneous.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "otto/core.hpp"
#include "otto/numerics.hpp"
#include "otto/schedule.hpp"
#include "otto/twolevel.hpp"

namespace otto::engine {

enum class Stroke { S12, S34 };

enum class ScheduleKind { Linear, Special, Tabulated };

struct StrokeSchedule {
  ScheduleKind kind = ScheduleKind::Linear;
  // (s, value) samples, only for Tabulated. For stroke 3->4 an empty table
  // reuses the stroke 1->2 table run backwards.
  std::vector<std::pair<double, double>> table;
};

struct TwoLevelMedium {
  twolevel::Params params;
  double lambda0 = 0.1;
  double lambda1 = 0.8;
};

struct OscillatorMedium {
  double omega0 = 2.0;
  double omega1 = 1.0;
  double mass = 1.0;
};

using Medium = std::variant<TwoLevelMedium, OscillatorMedium>;

enum class Spacing { Linear, Log };

struct TauGrid {
  double min = 1.0;
  double max = 50.0;
  int count = 200;
  Spacing spacing = Spacing::Linear;

  void validate() const;
  std::vector<double> values() const;
};

struct CycleSpec {
  Medium medium;
  BathPair baths{5.0, 2.0};
  StrokeSchedule stroke12;
  StrokeSchedule stroke34;
  TauGrid grid1;
  TauGrid grid3;
  numerics::IntegratorConfig integrator;

  // Grids, schedules and the engine regime of the quasi-static cycle.
  void validate() const;
};

enum class WorkModel { Exact, FirstOrder, MeanOnly };

struct SweepOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  // Minimum grid points per oscillation period pi / phi~(1) before the grid
  // is densified.
  int points_per_period = 20;
};

struct StrokeFailure {
  Stroke stroke;
  double tau;
  std::string message;
};

struct SweepResult {
  QuasistaticCycle quasistatic;
  std::vector<double> tau1_values;
  std::vector<double> tau3_values;
  // Row-major over (tau1 index, tau3 index).
  std::vector<CyclePoint> points;
  std::vector<CyclePoint> frontier;
  CyclePoint max_power_point;
  // Same grid with W_i = Sigma_i / tau_i^2.
  std::vector<CyclePoint> mean_points;
  std::vector<CyclePoint> mean_frontier;
  CyclePoint mean_max_power_point;
  double sigma1 = 0.0;
  double sigma3 = 0.0;
  // Undefined when either Sigma vanishes (flat-ended protocols).
  std::optional<double> eta_emp_model;
  std::vector<StrokeFailure> failures;
};

std::string_view to_string(Stroke stroke);
std::string_view to_string(ScheduleKind kind);

Schedule stroke_schedule(const CycleSpec& spec, Stroke stroke);
double stroke_beta(const CycleSpec& spec, Stroke stroke);

// phi~(1) of the stroke's protocol; sets the period pi / phi~(1) in tau.
double stroke_phase(const CycleSpec& spec, Stroke stroke);

double stroke_extra_work(const CycleSpec& spec, Stroke stroke, double tau,
                         WorkModel model = WorkModel::Exact);
WorkBreakdown stroke_breakdown(const CycleSpec& spec, Stroke stroke, double tau);

QuasistaticCycle quasistatic_cycle(const CycleSpec& spec);

CyclePoint make_point(const QuasistaticCycle& qc, double tau1, double tau3, double wex1,
                      double wex3);

CyclePoint evaluate_cycle(const CycleSpec& spec, double tau1, double tau3,
                          WorkModel model = WorkModel::Exact);

// Sigma_i = tau^2 * W_i^(mean)(tau).
std::pair<double, double> sigma_coefficients(const CycleSpec& spec);

// tau_n = n pi / phi~(1), n = 1..n_max. Requires special protocols on both
// strokes.
std::vector<double> zero_work_times(const CycleSpec& spec, int n_max);

// Valid (non-stalled) points not weakly dominated in (power, efficiency),
// sorted by increasing power. Exact duplicates keep the first occurrence.
std::vector<CyclePoint> pareto_frontier(const std::vector<CyclePoint>& points);

// Grid values, densified to honour points_per_period.
std::vector<double> resolved_grid(const TauGrid& grid, double period, int points_per_period);

SweepResult sweep(const CycleSpec& spec, const SweepOptions& options = {});

}  // namespace otto::engine

#endif  // OTTO_ENGINE_HPP
