#ifndef OTTO_SCHEDULE_HPP
#define OTTO_SCHEDULE_HPP

#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace otto {

// A dimensionless tuning protocol R(s) on rescaled time s = t / tau in [0, 1].
//
// Schedules are immutable values. Evaluating at s = 0 or s = 1 returns the
// stored endpoints bit-for-bit.
class Schedule {
 public:
  enum class Kind { Linear, SpecialTwoLevel, SpecialOscillator, Tabulated };

  static Schedule linear(double start, double end);

  // Two-level protocol with lambda'(s) / Lambda(s)^3 constant; theta is the
  // static-field angle. Requires sin(theta) != 0.
  static Schedule special_two_level(double start, double end, double theta);

  // Hyperbolic frequency ramp with omega'(s) / omega(s)^2 constant.
  // Requires positive endpoints.
  static Schedule special_oscillator(double start, double end);

  // Monotone cubic (PCHIP) interpolation through (s, value) samples. The s
  // values must be strictly increasing from exactly 0 to exactly 1; at least
  // four samples are required.
  static Schedule tabulated(std::vector<std::pair<double, double>> samples);

  double value(double s) const;
  double derivative(double s) const;

  double start() const { return start_; }
  double end() const { return end_; }
  Kind kind() const { return kind_; }
  std::optional<double> theta() const;
  const std::vector<std::pair<double, double>>& samples() const;

  // Same protocol run backwards: R_rev(s) = R(1 - s).
  Schedule reversed() const;

 private:
  struct Table;

  Schedule(Kind kind, double start, double end) : kind_(kind), start_(start), end_(end) {}
  double clamp_s(double s) const;

  Kind kind_;
  double start_;
  double end_;
  double theta_ = 0.0;
  // Two-level special protocol: f(lambda) = (lambda - cos theta) / Lambda at
  // both ends.
  double f_start_ = 0.0;
  double f_end_ = 0.0;
  std::shared_ptr<const Table> table_;
};

std::string_view to_string(Schedule::Kind kind);

}  // namespace otto

#endif  // OTTO_SCHEDULE_HPP
