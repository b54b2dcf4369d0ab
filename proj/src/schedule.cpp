#include "otto/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

// Boost 1.74 pchip.hpp calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "otto/errors.hpp"

namespace otto {

namespace {

double gap_of(double lambda, double theta) {
  return std::sqrt(lambda * lambda - 2.0 * lambda * std::cos(theta) + 1.0);
}

double special_f(double lambda, double theta) {
  return (lambda - std::cos(theta)) / gap_of(lambda, theta);
}

}  // namespace

struct Schedule::Table {
  std::vector<std::pair<double, double>> samples;
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

Schedule Schedule::linear(double start, double end) {
  if (!std::isfinite(start) || !std::isfinite(end)) {
    throw DomainError("Schedule::linear: endpoints must be finite");
  }
  return Schedule(Kind::Linear, start, end);
}

Schedule Schedule::special_two_level(double start, double end, double theta) {
  if (!std::isfinite(start) || !std::isfinite(end) || !std::isfinite(theta)) {
    throw DomainError("Schedule::special_two_level: arguments must be finite");
  }
  if (std::sin(theta) == 0.0) {
    throw DomainError("Schedule::special_two_level: sin(theta) must be nonzero");
  }
  Schedule s(Kind::SpecialTwoLevel, start, end);
  s.theta_ = theta;
  s.f_start_ = special_f(start, theta);
  s.f_end_ = special_f(end, theta);
  return s;
}

Schedule Schedule::special_oscillator(double start, double end) {
  if (!(start > 0) || !(end > 0) || !std::isfinite(start) || !std::isfinite(end)) {
    throw DomainError("Schedule::special_oscillator: frequencies must be positive and finite");
  }
  return Schedule(Kind::SpecialOscillator, start, end);
}

Schedule Schedule::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 4) {
    throw DomainError("Schedule::tabulated: at least 4 samples are required (got " +
                      std::to_string(samples.size()) + ")");
  }
  if (samples.front().first != 0.0 || samples.back().first != 1.0) {
    throw DomainError("Schedule::tabulated: samples must cover s in [0, 1] exactly");
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].first > samples[i - 1].first)) {
      throw DomainError("Schedule::tabulated: s must be strictly increasing (sample " +
                        std::to_string(i) + ")");
    }
  }
  for (const auto& [s, v] : samples) {
    if (!std::isfinite(v)) throw DomainError("Schedule::tabulated: non-finite value");
  }
  std::vector<double> xs, ys;
  xs.reserve(samples.size());
  ys.reserve(samples.size());
  for (const auto& [s, v] : samples) {
    xs.push_back(s);
    ys.push_back(v);
  }
  Schedule sched(Kind::Tabulated, samples.front().second, samples.back().second);
  sched.table_ = std::make_shared<const Table>(
      Table{std::move(samples),
            boost::math::interpolators::pchip<std::vector<double>>(std::move(xs), std::move(ys))});
  return sched;
}

double Schedule::clamp_s(double s) const {
  // Integrator stages can overshoot the interval end by a rounding error.
  if (!(s >= -1e-9 && s <= 1.0 + 1e-9)) {
    throw DomainError("Schedule: s = " + std::to_string(s) + " outside [0, 1]");
  }
  return std::clamp(s, 0.0, 1.0);
}

double Schedule::value(double s) const {
  s = clamp_s(s);
  if (s == 0.0) return start_;
  if (s == 1.0) return end_;
  switch (kind_) {
    case Kind::Linear:
      return start_ + (end_ - start_) * s;
    case Kind::SpecialTwoLevel: {
      if (start_ == end_) return start_;
      // f is strictly increasing with range (-1, 1), so the implicit
      // protocol equation inverts in closed form.
      const double f = f_start_ + s * (f_end_ - f_start_);
      const double u = f * std::abs(std::sin(theta_)) / std::sqrt(1.0 - f * f);
      return std::cos(theta_) + u;
    }
    case Kind::SpecialOscillator: {
      const double k = start_ / end_ - 1.0;
      return start_ / (k * s + 1.0);
    }
    case Kind::Tabulated:
      return table_->spline(s);
  }
  return 0.0;
}

double Schedule::derivative(double s) const {
  s = clamp_s(s);
  switch (kind_) {
    case Kind::Linear:
      return end_ - start_;
    case Kind::SpecialTwoLevel: {
      if (start_ == end_) return 0.0;
      const double sin_t = std::sin(theta_);
      const double g = gap_of(value(s), theta_);
      return (f_end_ - f_start_) * g * g * g / (sin_t * sin_t);
    }
    case Kind::SpecialOscillator: {
      const double k = start_ / end_ - 1.0;
      const double w = value(s);
      return -k * w * w / start_;
    }
    case Kind::Tabulated:
      return table_->spline.prime(s);
  }
  return 0.0;
}

std::optional<double> Schedule::theta() const {
  if (kind_ == Kind::SpecialTwoLevel) return theta_;
  return std::nullopt;
}

const std::vector<std::pair<double, double>>& Schedule::samples() const {
  static const std::vector<std::pair<double, double>> empty;
  return table_ ? table_->samples : empty;
}

Schedule Schedule::reversed() const {
  switch (kind_) {
    case Kind::Linear:
      return linear(end_, start_);
    case Kind::SpecialTwoLevel:
      // The constant-ratio condition and the endpoints fix the protocol
      // uniquely, so the reversal is the special protocol end -> start.
      return special_two_level(end_, start_, theta_);
    case Kind::SpecialOscillator:
      return special_oscillator(end_, start_);
    case Kind::Tabulated: {
      std::vector<std::pair<double, double>> flipped;
      flipped.reserve(table_->samples.size());
      for (auto it = table_->samples.rbegin(); it != table_->samples.rend(); ++it) {
        flipped.emplace_back(1.0 - it->first, it->second);
      }
      flipped.front().first = 0.0;
      flipped.back().first = 1.0;
      return tabulated(std::move(flipped));
    }
  }
  return *this;
}

std::string_view to_string(Schedule::Kind kind) {
  switch (kind) {
    case Schedule::Kind::Linear: return "linear";
    case Schedule::Kind::SpecialTwoLevel: return "special_two_level";
    case Schedule::Kind::SpecialOscillator: return "special_oscillator";
    case Schedule::Kind::Tabulated: return "tabulated";
  }
  return "unknown";
}

}  // namespace otto
