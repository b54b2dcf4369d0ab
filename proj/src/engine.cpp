#include "otto/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>
#include <tuple>

#include "otto/errors.hpp"
#include "otto/oscillator.hpp"

namespace otto::engine {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Runs body(i) for i in [0, n) on a pool of workers. Results are written by
// index, so completion order never affects the output.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::pair<double, double> endpoints_of(const Medium& medium) {
  return std::visit(Overloaded{[](const TwoLevelMedium& m) { return std::pair{m.lambda0, m.lambda1}; },
                               [](const OscillatorMedium& m) { return std::pair{m.omega0, m.omega1}; }},
                    medium);
}

twolevel::Adiabat two_level_adiabat(const CycleSpec& spec, const TwoLevelMedium& m,
                                    Stroke stroke) {
  return twolevel::Adiabat{m.params, stroke_schedule(spec, stroke), stroke_beta(spec, stroke)};
}

oscillator::Adiabat oscillator_adiabat(const CycleSpec& spec, const OscillatorMedium& m,
                                       Stroke stroke) {
  return oscillator::Adiabat{stroke_schedule(spec, stroke), stroke_beta(spec, stroke), m.mass};
}

void check_table(const std::vector<std::pair<double, double>>& table, double start, double end,
                 const char* which) {
  if (table.empty()) return;
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)); };
  if (!close(table.front().second, start) || !close(table.back().second, end)) {
    throw DomainError(std::string("CycleSpec: ") + which +
                      " table must start and end at the medium's endpoints");
  }
}

}  // namespace

std::string_view to_string(Stroke stroke) {
  return stroke == Stroke::S12 ? "12" : "34";
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Linear: return "linear";
    case ScheduleKind::Special: return "special";
    case ScheduleKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

void TauGrid::validate() const {
  if (!(min > 0) || !std::isfinite(min) || !std::isfinite(max)) {
    throw DomainError("TauGrid: bounds must be positive and finite");
  }
  if (max < min) throw DomainError("TauGrid: max must not be below min");
  if (count < 1) throw DomainError("TauGrid: count must be >= 1");
  if (count == 1 && max != min) throw DomainError("TauGrid: a single-point grid needs min == max");
  if (count >= 2 && max == min) throw DomainError("TauGrid: min == max requires count == 1");
}

std::vector<double> TauGrid::values() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = min;
    return out;
  }
  const double last = static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i) {
    const double frac = i / last;
    out[static_cast<std::size_t>(i)] =
        spacing == Spacing::Linear ? min + (max - min) * frac : min * std::pow(max / min, frac);
  }
  out.back() = max;
  return out;
}

void CycleSpec::validate() const {
  grid1.validate();
  grid3.validate();
  integrator.validate();
  std::visit(Overloaded{[](const TwoLevelMedium& m) { m.params.validate(); },
                        [](const OscillatorMedium& m) {
                          if (!(m.omega0 > 0) || !(m.omega1 > 0)) {
                            throw DomainError("CycleSpec: frequencies must be positive");
                          }
                          if (!(m.mass > 0)) throw DomainError("CycleSpec: mass must be positive");
                        }},
             medium);
  const auto [r0, r1] = endpoints_of(medium);
  if (stroke12.kind == ScheduleKind::Tabulated) {
    if (stroke12.table.empty()) throw DomainError("CycleSpec: stroke 1->2 table is empty");
    check_table(stroke12.table, r0, r1, "stroke 1->2");
  }
  if (stroke34.kind == ScheduleKind::Tabulated) {
    if (stroke34.table.empty() && stroke12.table.empty()) {
      throw DomainError("CycleSpec: stroke 3->4 is tabulated but no table is given");
    }
    check_table(stroke34.table, r1, r0, "stroke 3->4");
  }
  const auto qc = quasistatic_cycle(*this);
  if (!(qc.w_total_adi > 0)) {
    throw DomainError("CycleSpec: quasi-static net work must be positive");
  }
  // Building the schedules surfaces table errors early.
  (void)stroke_schedule(*this, Stroke::S12);
  (void)stroke_schedule(*this, Stroke::S34);
}

Schedule stroke_schedule(const CycleSpec& spec, Stroke stroke) {
  const auto [r0, r1] = endpoints_of(spec.medium);
  const bool forward = stroke == Stroke::S12;
  const StrokeSchedule& sel = forward ? spec.stroke12 : spec.stroke34;
  const double from = forward ? r0 : r1;
  const double to = forward ? r1 : r0;
  switch (sel.kind) {
    case ScheduleKind::Linear:
      return Schedule::linear(from, to);
    case ScheduleKind::Special:
      return std::visit(
          Overloaded{[&](const TwoLevelMedium& m) {
                       return twolevel::special_schedule(from, to, m.params.theta);
                     },
                     [&](const OscillatorMedium&) { return oscillator::special_schedule(from, to); }},
          spec.medium);
    case ScheduleKind::Tabulated:
      if (!sel.table.empty()) return Schedule::tabulated(sel.table);
      return Schedule::tabulated(spec.stroke12.table).reversed();
  }
  throw DomainError("stroke_schedule: unknown schedule kind");
}

double stroke_beta(const CycleSpec& spec, Stroke stroke) {
  return stroke == Stroke::S12 ? spec.baths.beta_hot() : spec.baths.beta_cold();
}

double stroke_phase(const CycleSpec& spec, Stroke stroke) {
  return std::visit(
      Overloaded{[&](const TwoLevelMedium& m) {
                   return twolevel::dynamical_phase(two_level_adiabat(spec, m, stroke), 1.0);
                 },
                 [&](const OscillatorMedium& m) {
                   return oscillator::dynamical_phase(oscillator_adiabat(spec, m, stroke), 1.0);
                 }},
      spec.medium);
}

double stroke_extra_work(const CycleSpec& spec, Stroke stroke, double tau, WorkModel model) {
  return std::visit(
      Overloaded{[&](const TwoLevelMedium& m) {
                   const auto a = two_level_adiabat(spec, m, stroke);
                   switch (model) {
                     case WorkModel::Exact:
                       return twolevel::exact_extra_work(a, tau, spec.integrator);
                     case WorkModel::FirstOrder:
                       return twolevel::mean_extra_work(a, tau) + twolevel::osc_extra_work(a, tau);
                     case WorkModel::MeanOnly:
                       return twolevel::mean_extra_work(a, tau);
                   }
                   return kNaN;
                 },
                 [&](const OscillatorMedium& m) {
                   const auto a = oscillator_adiabat(spec, m, stroke);
                   switch (model) {
                     case WorkModel::Exact:
                       return oscillator::exact_extra_work(a, tau, spec.integrator);
                     case WorkModel::FirstOrder:
                       return oscillator::mean_extra_work(a, tau) + oscillator::osc_extra_work(a, tau);
                     case WorkModel::MeanOnly:
                       return oscillator::mean_extra_work(a, tau);
                   }
                   return kNaN;
                 }},
      spec.medium);
}

WorkBreakdown stroke_breakdown(const CycleSpec& spec, Stroke stroke, double tau) {
  return std::visit(
      Overloaded{[&](const TwoLevelMedium& m) {
                   return twolevel::work_breakdown(two_level_adiabat(spec, m, stroke), tau,
                                                   spec.integrator);
                 },
                 [&](const OscillatorMedium& m) {
                   return oscillator::work_breakdown(oscillator_adiabat(spec, m, stroke), tau,
                                                     spec.integrator);
                 }},
      spec.medium);
}

QuasistaticCycle quasistatic_cycle(const CycleSpec& spec) {
  return std::visit(
      Overloaded{[&](const TwoLevelMedium& m) {
                   return twolevel::quasistatic_cycle(m.lambda0, m.lambda1, m.params.theta,
                                                      m.params.epsilon, spec.baths);
                 },
                 [&](const OscillatorMedium& m) {
                   return oscillator::quasistatic_cycle(m.omega0, m.omega1, spec.baths);
                 }},
      spec.medium);
}

CyclePoint make_point(const QuasistaticCycle& qc, double tau1, double tau3, double wex1,
                      double wex3) {
  CyclePoint p{tau1, tau3, kNaN, kNaN, PointStatus::Invalid};
  if (!std::isfinite(wex1) || !std::isfinite(wex3)) return p;
  p.power = cycle_power(qc, wex1, wex3, tau1, tau3);
  try {
    p.efficiency = cycle_efficiency(qc, wex1, wex3);
  } catch (const DomainError&) {
    return p;
  }
  p.status = p.power > 0 ? PointStatus::Valid : PointStatus::Stalled;
  return p;
}

CyclePoint evaluate_cycle(const CycleSpec& spec, double tau1, double tau3, WorkModel model) {
  if (!(tau1 > 0) || !(tau3 > 0)) {
    throw DomainError("evaluate_cycle: control times must be positive");
  }
  const auto qc = quasistatic_cycle(spec);
  const double w1 = stroke_extra_work(spec, Stroke::S12, tau1, model);
  const double w3 = stroke_extra_work(spec, Stroke::S34, tau3, model);
  return make_point(qc, tau1, tau3, w1, w3);
}

std::pair<double, double> sigma_coefficients(const CycleSpec& spec) {
  return {stroke_extra_work(spec, Stroke::S12, 1.0, WorkModel::MeanOnly),
          stroke_extra_work(spec, Stroke::S34, 1.0, WorkModel::MeanOnly)};
}

std::vector<double> zero_work_times(const CycleSpec& spec, int n_max) {
  if (spec.stroke12.kind != ScheduleKind::Special || spec.stroke34.kind != ScheduleKind::Special) {
    throw DomainError("zero_work_times: both strokes must use the special protocol");
  }
  if (n_max < 0) throw DomainError("zero_work_times: n_max must be >= 0");
  const double phase = std::visit(
      Overloaded{[](const TwoLevelMedium& m) {
                   return twolevel::special_phase_total(m.lambda0, m.lambda1, m.params.theta,
                                                        m.params.epsilon);
                 },
                 [](const OscillatorMedium& m) {
                   return oscillator::special_phase_total(m.omega0, m.omega1);
                 }},
      spec.medium);
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) times.push_back(n * std::numbers::pi / phase);
  return times;
}

std::vector<CyclePoint> pareto_frontier(const std::vector<CyclePoint>& points) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].status == PointStatus::Valid) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].power != points[b].power) return points[a].power > points[b].power;
    return points[a].efficiency > points[b].efficiency;
  });
  std::vector<CyclePoint> frontier;
  double best_eta = -std::numeric_limits<double>::infinity();
  for (std::size_t i : order) {
    if (points[i].efficiency > best_eta) {
      frontier.push_back(points[i]);
      best_eta = points[i].efficiency;
    }
  }
  std::reverse(frontier.begin(), frontier.end());
  return frontier;
}

std::vector<double> resolved_grid(const TauGrid& grid, double period, int points_per_period) {
  grid.validate();
  if (grid.count == 1 || !(period > 0) || points_per_period <= 0) return grid.values();
  const double needed = period / points_per_period;
  TauGrid dense = grid;
  if (grid.spacing == Spacing::Linear) {
    const double step = (grid.max - grid.min) / (grid.count - 1);
    if (step > needed) dense.count = static_cast<int>(std::ceil((grid.max - grid.min) / needed)) + 1;
  } else if (needed < grid.max) {
    // Widest gap sits at the top: max (1 - 1 / ratio) <= needed.
    const double max_ratio = 1.0 / (1.0 - needed / grid.max);
    const int required =
        static_cast<int>(std::ceil(std::log(grid.max / grid.min) / std::log(max_ratio))) + 1;
    dense.count = std::max(grid.count, required);
  }
  return dense.values();
}

SweepResult sweep(const CycleSpec& spec, const SweepOptions& options) {
  spec.validate();
  SweepResult result;
  result.quasistatic = quasistatic_cycle(spec);
  const auto& qc = result.quasistatic;

  const double period12 = std::numbers::pi / stroke_phase(spec, Stroke::S12);
  const double period34 = std::numbers::pi / stroke_phase(spec, Stroke::S34);
  result.tau1_values = resolved_grid(spec.grid1, period12, options.points_per_period);
  result.tau3_values = resolved_grid(spec.grid3, period34, options.points_per_period);
  const auto& t1 = result.tau1_values;
  const auto& t3 = result.tau3_values;

  // Each stroke's extra work depends on its own control time only, so the
  // grid needs |t1| + |t3| integrations rather than |t1| * |t3|.
  std::vector<double> w1(t1.size(), kNaN), w3(t3.size(), kNaN);
  std::vector<std::string> err1(t1.size()), err3(t3.size());
  const std::size_t total = t1.size() + t3.size();
  parallel_for(total, options.threads, [&](std::size_t k) {
    const bool first = k < t1.size();
    const std::size_t i = first ? k : k - t1.size();
    const Stroke stroke = first ? Stroke::S12 : Stroke::S34;
    const double tau = first ? t1[i] : t3[i];
    try {
      (first ? w1 : w3)[i] = stroke_extra_work(spec, stroke, tau, WorkModel::Exact);
    } catch (const std::exception& e) {
      (first ? err1 : err3)[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < t1.size(); ++i) {
    if (!err1[i].empty()) result.failures.push_back({Stroke::S12, t1[i], err1[i]});
  }
  for (std::size_t j = 0; j < t3.size(); ++j) {
    if (!err3[j].empty()) result.failures.push_back({Stroke::S34, t3[j], err3[j]});
  }

  std::tie(result.sigma1, result.sigma3) = sigma_coefficients(spec);
  if (result.sigma1 > 0 && result.sigma3 > 0) {
    result.eta_emp_model = emp_mean_only(qc.eta_adi, result.sigma1, result.sigma3);
  }

  result.points.reserve(t1.size() * t3.size());
  result.mean_points.reserve(t1.size() * t3.size());
  for (std::size_t i = 0; i < t1.size(); ++i) {
    for (std::size_t j = 0; j < t3.size(); ++j) {
      result.points.push_back(make_point(qc, t1[i], t3[j], w1[i], w3[j]));
      result.mean_points.push_back(make_point(qc, t1[i], t3[j], result.sigma1 / (t1[i] * t1[i]),
                                              result.sigma3 / (t3[j] * t3[j])));
    }
  }

  auto max_power = [](const std::vector<CyclePoint>& pts) {
    CyclePoint best{0.0, 0.0, kNaN, kNaN, PointStatus::Invalid};
    for (const auto& p : pts) {
      if (p.status == PointStatus::Invalid) continue;
      if (best.status == PointStatus::Invalid || p.power > best.power) best = p;
    }
    return best;
  };
  result.frontier = pareto_frontier(result.points);
  result.max_power_point = max_power(result.points);
  result.mean_frontier = pareto_frontier(result.mean_points);
  result.mean_max_power_point = max_power(result.mean_points);
  return result;
}

}  // namespace otto::engine
