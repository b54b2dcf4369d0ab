#include "otto/core.hpp"

#include <cmath>
#include <string>

#include "otto/errors.hpp"

namespace otto {

BathPair::BathPair(double t_hot, double t_cold) : t_hot_(t_hot), t_cold_(t_cold) {
  if (!std::isfinite(t_hot) || !std::isfinite(t_cold)) {
    throw DomainError("BathPair: temperatures must be finite");
  }
  if (!(t_cold > 0)) throw DomainError("BathPair: T_cold must be positive");
  if (!(t_hot > t_cold)) {
    throw DomainError("BathPair: T_hot (" + std::to_string(t_hot) +
                      ") must exceed T_cold (" + std::to_string(t_cold) + ")");
  }
}

double cycle_power(const QuasistaticCycle& qc, double wex1, double wex3, double tau1,
                   double tau3) {
  if (!(tau1 > 0) || !(tau3 > 0)) {
    throw DomainError("cycle_power: control times must be positive");
  }
  return (qc.w_total_adi - wex1 - wex3) / (tau1 + tau3);
}

double cycle_efficiency(const QuasistaticCycle& qc, double wex1, double wex3) {
  const double denominator = qc.q_hot_adi - wex3;
  if (!(denominator > 0)) {
    throw DomainError("cycle_efficiency: Q_h^adi - W3_ex = " + std::to_string(denominator) +
                      " <= 0, no net heat absorbed from the hot bath");
  }
  return (qc.w_total_adi - wex1 - wex3) / denominator;
}

double emp_mean_only(double eta_adi, double sigma1, double sigma3) {
  if (!(sigma1 > 0) || !(sigma3 > 0)) {
    throw DomainError("emp_mean_only: Sigma coefficients must be positive");
  }
  if (!(eta_adi > 0) || !(eta_adi < 1)) {
    throw DomainError("emp_mean_only: eta_adi must lie in (0, 1)");
  }
  return 2.0 * eta_adi / (3.0 - eta_adi / (1.0 + std::cbrt(sigma1 / sigma3)));
}

}  // namespace otto
