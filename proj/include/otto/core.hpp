#ifndef OTTO_CORE_HPP
#define OTTO_CORE_HPP

// Shared bookkeeping for finite-time Otto cycles. Units: hbar = k_B = 1.
//
// Net work and extra works are positive magnitudes in the engine regime, in
// the form they enter the power and efficiency formulas.

namespace otto {

class BathPair {
 public:
  // Requires t_hot > t_cold > 0.
  BathPair(double t_hot, double t_cold);

  double t_hot() const { return t_hot_; }
  double t_cold() const { return t_cold_; }
  double beta_hot() const { return 1.0 / t_hot_; }
  double beta_cold() const { return 1.0 / t_cold_; }
  double carnot_efficiency() const { return 1.0 - t_cold_ / t_hot_; }

 private:
  double t_hot_;
  double t_cold_;
};

// Work ledger of one adiabat at one control time.
struct WorkBreakdown {
  double tau = 0.0;
  double w_adi = 0.0;
  double w_ex_exact = 0.0;
  double w_mean = 0.0;
  double w_osc = 0.0;

  double w_first_order() const { return w_mean + w_osc; }
};

struct QuasistaticCycle {
  double w_total_adi = 0.0;
  double q_hot_adi = 0.0;
  double eta_adi = 0.0;
};

enum class PointStatus {
  Valid,
  Stalled,  // P <= 0: the extra work consumes the quasi-static net work
  Invalid,  // efficiency undefined, or a stroke failed to evaluate
};

struct CyclePoint {
  double tau1 = 0.0;
  double tau3 = 0.0;
  double power = 0.0;
  double efficiency = 0.0;
  PointStatus status = PointStatus::Valid;
};

// (W_T - wex1 - wex3) / (tau1 + tau3). Negative when the engine stalls.
double cycle_power(const QuasistaticCycle& qc, double wex1, double wex3, double tau1,
                   double tau3);

// (W_T - wex1 - wex3) / (Q_h - wex3). Throws DomainError when the cycle no
// longer absorbs net heat from the hot bath (Q_h - wex3 <= 0).
double cycle_efficiency(const QuasistaticCycle& qc, double wex1, double wex3);

// Efficiency at maximum power when each extra work is Sigma_i / tau_i^2.
double emp_mean_only(double eta_adi, double sigma1, double sigma3);

}  // namespace otto

#endif  // OTTO_CORE_HPP
