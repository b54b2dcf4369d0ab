#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <variant>

#include <fmt/format.h>

#include "otto/cli.hpp"
#include "otto/oscillator.hpp"
#include "otto/twolevel.hpp"

namespace otto::cli {

namespace {

using engine::Stroke;

constexpr double kTauChecks[] = {1.0, 5.0, 20.0, 50.0};
constexpr double kTauOracle[] = {2.0, 5.0, 10.0, 20.0};

Check le(std::string name, double measured, double threshold) {
  return Check{std::move(name), measured, threshold, "<=", measured <= threshold};
}

Check ge(std::string name, double measured, double threshold) {
  return Check{std::move(name), measured, threshold, ">=", measured >= threshold};
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

void two_level_checks(const RunConfig& config, const engine::TwoLevelMedium& m,
                      std::vector<Check>& out) {
  const auto& cfg = config.spec.integrator;
  for (Stroke stroke : {Stroke::S12, Stroke::S34}) {
    const std::string tag = fmt::format("[{}]", engine::to_string(stroke));
    const twolevel::Adiabat a{m.params, engine::stroke_schedule(config.spec, stroke),
                              engine::stroke_beta(config.spec, stroke)};
    double norm_err = 0.0, sym_err = 0.0, min_work = std::numeric_limits<double>::infinity();
    double identity_err = 0.0, scaling_err = 0.0;
    const double sigma = twolevel::mean_extra_work(a, 1.0);
    const double eps = m.params.epsilon;
    const double lam0 = twolevel::gap(a.schedule.value(0.0), m.params.theta);
    const double lam1 = twolevel::gap(a.schedule.value(1.0), m.params.theta);
    const double prefactor = 2.0 * eps * lam1 * std::tanh(a.beta * eps * lam0);
    for (double tau : kTauChecks) {
      const auto g = twolevel::integrate_amplitudes(a, tau, cfg, twolevel::Level::Ground);
      const auto e = twolevel::integrate_amplitudes(a, tau, cfg, twolevel::Level::Excited);
      norm_err = std::max({norm_err, g.max_norm_error, e.max_norm_error});
      sym_err = std::max(sym_err, std::abs(std::norm(e.ground) - std::norm(g.excited)));
      min_work = std::min(min_work, twolevel::exact_extra_work(a, tau, cfg));
      const double mean = twolevel::mean_extra_work(a, tau);
      const double first = mean + twolevel::osc_extra_work(a, tau);
      const double direct = prefactor * std::norm(twolevel::first_order_amplitude(a, tau));
      identity_err = std::max(identity_err, std::abs(first - direct) / std::max(mean, 1e-300));
      scaling_err = std::max(scaling_err, rel_diff(tau * tau * mean, sigma));
    }
    out.push_back(le("unitarity" + tag, norm_err, 1e-9));
    out.push_back(le("symmetric_transition" + tag, sym_err, 1e-9));
    out.push_back(ge("extra_work_nonnegative" + tag, min_work, 0.0));
    out.push_back(le("first_order_identity" + tag, identity_err, 1e-12));
    out.push_back(le("mean_tau2_constancy" + tag, scaling_err, 1e-12));
  }

  // Zero-work times of the special protocol between the same endpoints.
  const twolevel::Adiabat special{m.params,
                                  twolevel::special_schedule(m.lambda0, m.lambda1, m.params.theta),
                                  config.spec.baths.beta_hot()};
  const double phase =
      twolevel::special_phase_total(m.lambda0, m.lambda1, m.params.theta, m.params.epsilon);
  double zero_err = 0.0;
  for (int n = 1; n <= 5; ++n) {
    const double tau = n * std::numbers::pi / phase;
    zero_err = std::max(zero_err, std::abs(twolevel::mean_extra_work(special, tau) +
                                           twolevel::osc_extra_work(special, tau)));
  }
  out.push_back(le("special_first_order_zeros", zero_err, 1e-12));
}

void oscillator_checks(const RunConfig& config, const engine::OscillatorMedium& m,
                       std::vector<Check>& out) {
  const auto& cfg = config.spec.integrator;
  for (Stroke stroke : {Stroke::S12, Stroke::S34}) {
    const std::string tag = fmt::format("[{}]", engine::to_string(stroke));
    const oscillator::Adiabat a{engine::stroke_schedule(config.spec, stroke),
                                engine::stroke_beta(config.spec, stroke), m.mass};
    const double w0 = a.schedule.value(0.0);
    const double w1 = a.schedule.value(1.0);

    double min_n = std::numeric_limits<double>::infinity();
    double min_work = std::numeric_limits<double>::infinity();
    double oracle_err = 0.0, norm_err = 0.0, parity = 0.0, mass_err = 0.0, beta_err = 0.0;
    double identity_err = 0.0, scaling_err = 0.0;
    const double sigma = oscillator::mean_extra_work(a, 1.0);
    oscillator::Adiabat heavy = a;
    heavy.mass = 3.5 * a.mass;
    oscillator::Adiabat colder = a;
    colder.beta = 2.5 * a.beta;
    for (double tau : kTauOracle) {
      const double n_factor = oscillator::nonadiabatic_factor(a, tau, cfg);
      min_n = std::min(min_n, n_factor);
      const double w = oscillator::exact_extra_work(a, tau, cfg);
      min_work = std::min(min_work, w);
      oracle_err = std::max(oracle_err, std::abs(w - oscillator::extra_work_fock(a, tau, {}, cfg)));
      mass_err = std::max(mass_err, rel_diff(w, oscillator::exact_extra_work(heavy, tau, cfg)));
      const double reduced = w / (1.0 / std::tanh(a.beta * w0 / 2.0));
      const double reduced_cold = oscillator::exact_extra_work(colder, tau, cfg) /
                                  (1.0 / std::tanh(colder.beta * w0 / 2.0));
      beta_err = std::max(beta_err, rel_diff(reduced, reduced_cold));
      for (int n : {0, 1, 4}) {
        const auto ladder =
            oscillator::fock_integrate(a, tau, n, oscillator::ladder_cutoff(n), cfg);
        norm_err = std::max(norm_err, std::abs(ladder.norm() - 1.0));
        for (int k = 0; k <= ladder.cutoff; ++k) {
          if ((k - n) % 2 != 0) {
            parity = std::max(parity, std::abs(ladder.amplitudes[static_cast<std::size_t>(k)]));
          }
        }
      }

      // First-order Fock sum carried until the thermal tail underflows.
      const double mean = oscillator::mean_extra_work(a, tau);
      const double first = mean + oscillator::osc_extra_work(a, tau);
      double direct = 0.0;
      for (int n = 0;; ++n) {
        const double p = oscillator::thermal_weight(a.beta, w0, n);
        const auto [up, down] = oscillator::first_order_fock_amplitudes(a, tau, n);
        const double term = p * (std::norm(up) - std::norm(down)) * 2.0 * w1;
        direct += term;
        if (p * (n + 0.5) < 1e-20 || n > 100000) break;
      }
      identity_err = std::max(identity_err, std::abs(first - direct) / std::max(mean, 1e-300));
      scaling_err = std::max(scaling_err, rel_diff(tau * tau * mean, sigma));
    }
    out.push_back(ge("nonadiabatic_factor_min" + tag, min_n, 1.0 - 1e-12));
    out.push_back(ge("extra_work_nonnegative" + tag, min_work, 0.0));
    out.push_back(le("ermakov_fock_agreement" + tag, oracle_err, 1e-6));
    out.push_back(le("fock_norm" + tag, norm_err, 1e-8));
    out.push_back(le("parity_conservation" + tag, parity, 0.0));
    out.push_back(le("mass_invariance" + tag, mass_err, 1e-12));
    out.push_back(le("beta_factorization" + tag, beta_err, 1e-12));
    out.push_back(le("first_order_identity" + tag, identity_err, 1e-12));
    out.push_back(le("mean_tau2_constancy" + tag, scaling_err, 1e-12));
  }

  const oscillator::Adiabat special{oscillator::special_schedule(m.omega0, m.omega1),
                                    config.spec.baths.beta_hot(), m.mass};
  const double phase = oscillator::special_phase_total(m.omega0, m.omega1);
  double zero_err = 0.0;
  for (int n = 1; n <= 5; ++n) {
    const double tau = n * std::numbers::pi / phase;
    zero_err = std::max(zero_err, std::abs(oscillator::mean_extra_work(special, tau) +
                                           oscillator::osc_extra_work(special, tau)));
  }
  out.push_back(le("special_first_order_zeros", zero_err, 1e-12));
}

void sweep_checks(const RunConfig& config, unsigned threads, std::vector<Check>& out) {
  engine::SweepOptions opts;
  opts.threads = threads;
  const auto r = engine::sweep(config.spec, opts);
  const double eta_adi = r.quasistatic.eta_adi;
  const double carnot = config.spec.baths.carnot_efficiency();
  double excess_adi = -std::numeric_limits<double>::infinity();
  double excess_carnot = -std::numeric_limits<double>::infinity();
  double non_finite = 0.0;
  for (const auto& p : r.points) {
    if (p.status == PointStatus::Invalid) continue;
    if (!std::isfinite(p.power) || !std::isfinite(p.efficiency)) ++non_finite;
    if (p.status != PointStatus::Valid) continue;
    excess_adi = std::max(excess_adi, p.efficiency - eta_adi);
    excess_carnot = std::max(excess_carnot, p.efficiency - carnot);
  }
  double dominated = 0.0;
  for (const auto& f : r.frontier) {
    for (const auto& p : r.points) {
      if (p.status == PointStatus::Valid && p.power > f.power && p.efficiency > f.efficiency) {
        ++dominated;
        break;
      }
    }
  }
  // Rounding in (W - w1 - w3) / (Q - w3) can exceed W / Q by a few ulps.
  out.push_back(le("sweep_eta_minus_eta_adi", excess_adi, 1e-12));
  out.push_back(le("sweep_eta_minus_carnot", excess_carnot, 1e-12));
  out.push_back(le("sweep_non_finite_values", non_finite, 0.0));
  out.push_back(le("frontier_dominated_points", dominated, 0.0));
  out.push_back(le("sweep_stroke_failures", static_cast<double>(r.failures.size()), 0.0));

  // Rerun single-threaded: completion order must not leak into the output.
  engine::SweepOptions serial = opts;
  serial.threads = 1;
  const auto a = sweep_csv(config, r);
  const auto b = sweep_csv(config, engine::sweep(config.spec, serial));
  const double differing = (a.cloud != b.cloud) + (a.frontier != b.frontier) +
                           (a.mean_cloud != b.mean_cloud) + (a.summary != b.summary);
  out.push_back(le("deterministic_csv_mismatches", differing, 0.0));
}

}  // namespace

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string ValidationReport::render() const {
  std::string out = fmt::format("validate {}\n", config_name);
  for (const auto& c : checks) {
    out += fmt::format("  {:<4} {:<36} measured {:<12.4e} {} {:.4e}\n", c.passed ? "ok" : "FAIL",
                       c.name, c.measured, c.relation, c.threshold);
  }
  return out;
}

ValidationReport validate(const RunConfig& config, unsigned threads) {
  ValidationReport report;
  report.config_name = config.name;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, engine::TwoLevelMedium>) {
          two_level_checks(config, m, report.checks);
        } else {
          oscillator_checks(config, m, report.checks);
        }
      },
      config.spec.medium);
  sweep_checks(config, threads, report.checks);
  return report;
}

}  // namespace otto::cli
