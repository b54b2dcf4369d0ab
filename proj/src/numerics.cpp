#include "otto/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace otto::numerics {

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0) || !(abs_tol > 0)) {
    throw DomainError("IntegratorConfig: tolerances must be positive");
  }
  if (max_steps < 1) throw DomainError("IntegratorConfig: max_steps must be >= 1");
  if (!(initial_step > 0) || initial_step > 1) {
    throw DomainError("IntegratorConfig: initial_step must lie in (0, 1]");
  }
}

double quad(const std::function<double(double)>& f, double a, double b,
            const QuadConfig& cfg) {
  if (a == b) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, cfg.max_depth, cfg.rel_tol, &error, &l1);
  if (!std::isfinite(value)) throw NumericalError("quad: non-finite integral");
  // Kronrod's estimate is pessimistic by construction; allow a small margin.
  if (error > 10.0 * cfg.rel_tol * l1 + 1e-300) {
    throw NumericalError("quad: did not converge (estimated error " +
                         std::to_string(error) + " on |integral| " + std::to_string(l1) + ")");
  }
  return value;
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
  if (!(tol > 0)) throw DomainError("find_root: tolerance must be positive");
  if (lo > hi) std::swap(lo, hi);
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    throw DomainError("find_root: no sign change over [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  // 200 halvings exhaust double precision on any finite bracket.
  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  if (hi - lo > tol) throw NumericalError("find_root: bracket did not shrink below tol");
  return lo + 0.5 * (hi - lo);
}

}  // namespace otto::numerics
