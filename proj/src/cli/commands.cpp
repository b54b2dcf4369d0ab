#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <variant>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "otto/cli.hpp"
#include "otto/errors.hpp"

namespace otto::cli {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string_view medium_name(const engine::Medium& m) {
  return std::holds_alternative<engine::TwoLevelMedium>(m) ? "two_level" : "oscillator";
}

std::string header(const RunConfig& config, std::string_view command) {
  std::string out = fmt::format("# otto {}\n", command);
  out += fmt::format("# config: {}\n", config.name);
  out += fmt::format("# config_hash: {}\n", config.hash());
  out += fmt::format("# medium: {}\n", medium_name(config.spec.medium));
  out += fmt::format("# schedule12: {}\n", engine::to_string(config.spec.stroke12.kind));
  out += fmt::format("# schedule34: {}\n", engine::to_string(config.spec.stroke34.kind));
  out += fmt::format("# t_hot: {}\n# t_cold: {}\n", num(config.spec.baths.t_hot()),
                     num(config.spec.baths.t_cold()));
  return out;
}

int stall_flag(PointStatus s) {
  switch (s) {
    case PointStatus::Valid: return 0;
    case PointStatus::Stalled: return 1;
    case PointStatus::Invalid: return 2;
  }
  return 2;
}

std::string cloud_rows(const std::vector<CyclePoint>& points) {
  std::string out = "tau1,tau3,power,efficiency,stall_flag\n";
  for (const auto& p : points) {
    if (p.status == PointStatus::Invalid) {
      out += fmt::format("{},{},,,{}\n", num(p.tau1), num(p.tau3), stall_flag(p.status));
    } else {
      out += fmt::format("{},{},{},{},{}\n", num(p.tau1), num(p.tau3), num(p.power),
                         num(p.efficiency), stall_flag(p.status));
    }
  }
  return out;
}

std::string frontier_rows(const std::vector<CyclePoint>& points) {
  std::string out = "tau1,tau3,power,efficiency\n";
  for (const auto& p : points) {
    out += fmt::format("{},{},{},{}\n", num(p.tau1), num(p.tau3), num(p.power),
                       num(p.efficiency));
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("{}: cannot open for writing", path.string()));
  out << content;
  if (!out) throw ConfigError(fmt::format("{}: write failed", path.string()));
}

}  // namespace

engine::Stroke parse_stroke(std::string_view text) {
  if (text == "12") return engine::Stroke::S12;
  if (text == "34") return engine::Stroke::S34;
  throw ConfigError(fmt::format("stroke must be 12 or 34 (got '{}')", text));
}

std::vector<double> parse_tau_list(std::string_view text) {
  std::vector<double> taus;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item(text.substr(pos, comma - pos));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !(v > 0) || !std::isfinite(v)) {
      throw ConfigError(fmt::format("--taus: '{}' is not a positive number", item));
    }
    taus.push_back(v);
    pos = comma + 1;
  }
  return taus;
}

std::vector<double> default_adiabat_taus(const RunConfig& config, engine::Stroke stroke) {
  const auto& grid = stroke == engine::Stroke::S12 ? config.spec.grid1
                                                             : config.spec.grid3;
  const double period = std::numbers::pi / engine::stroke_phase(config.spec, stroke);
  return engine::resolved_grid(grid, period, engine::SweepOptions{}.points_per_period);
}

std::string adiabat_csv(const RunConfig& config, engine::Stroke stroke,
                        const std::vector<double>& taus) {
  std::string out = header(config, "adiabat");
  out += fmt::format("# stroke: {}\n", engine::to_string(stroke));
  out += fmt::format("# beta: {}\n", num(engine::stroke_beta(config.spec, stroke)));
  out += fmt::format("# phase_total: {}\n", num(engine::stroke_phase(config.spec, stroke)));
  std::string body = "tau,w_exact,w_first_order,w_mean,w_osc\n";
  double w_adi = 0.0;
  for (double tau : taus) {
    const auto b = engine::stroke_breakdown(config.spec, stroke, tau);
    w_adi = b.w_adi;
    body += fmt::format("{},{},{},{},{}\n", num(tau), num(b.w_ex_exact), num(b.w_first_order()),
                        num(b.w_mean), num(b.w_osc));
  }
  if (!taus.empty()) out += fmt::format("# w_adi: {}\n", num(w_adi));
  return out + body;
}

std::string protocol_csv(const RunConfig& config, engine::Stroke stroke, int samples) {
  if (samples < 2) throw ConfigError("--samples must be >= 2");
  const auto sched = engine::stroke_schedule(config.spec, stroke);
  std::string out = header(config, "protocol");
  out += fmt::format("# stroke: {}\n", engine::to_string(stroke));
  out += fmt::format("# kind: {}\n", to_string(sched.kind()));
  out += "s,value,derivative\n";
  for (int i = 0; i < samples; ++i) {
    const double s = i == samples - 1 ? 1.0 : static_cast<double>(i) / (samples - 1);
    out += fmt::format("{},{},{}\n", num(s), num(sched.value(s)), num(sched.derivative(s)));
  }
  return out;
}

SweepCsv sweep_csv(const RunConfig& config, const engine::SweepResult& r) {
  SweepCsv csv;
  const std::string meta =
      fmt::format("# grid: {} x {}\n", r.tau1_values.size(), r.tau3_values.size());
  csv.cloud = header(config, "sweep cloud") + meta + "# model: exact\n" + cloud_rows(r.points);
  csv.mean_cloud =
      header(config, "sweep mean cloud") + meta + "# model: mean_only\n" + cloud_rows(r.mean_points);
  csv.frontier = header(config, "sweep frontier") + meta + "# model: exact\n" +
                 frontier_rows(r.frontier);

  std::size_t valid = 0, stalled = 0, invalid = 0;
  for (const auto& p : r.points) {
    if (p.status == PointStatus::Valid) ++valid;
    if (p.status == PointStatus::Stalled) ++stalled;
    if (p.status == PointStatus::Invalid) ++invalid;
  }
  std::string s = header(config, "sweep summary") + meta;
  for (const auto& f : r.failures) {
    s += fmt::format("# failure: stroke {} tau {}: {}\n", engine::to_string(f.stroke),
                     num(f.tau), f.message);
  }
  s += "key,value\n";
  auto row = [&](std::string_view key, double v) {
    s += std::isfinite(v) ? fmt::format("{},{}\n", key, num(v)) : fmt::format("{},\n", key);
  };
  const auto& mp = r.max_power_point;
  const auto& mm = r.mean_max_power_point;
  row("max_power", mp.power);
  row("eta_at_max_power", mp.efficiency);
  row("tau1_at_max_power", mp.tau1);
  row("tau3_at_max_power", mp.tau3);
  row("eta_adi", r.quasistatic.eta_adi);
  row("w_total_adi", r.quasistatic.w_total_adi);
  row("q_hot_adi", r.quasistatic.q_hot_adi);
  row("eta_carnot", config.spec.baths.carnot_efficiency());
  row("eta_emp", r.eta_emp_model.value_or(std::nan("")));
  row("sigma1", r.sigma1);
  row("sigma3", r.sigma3);
  row("mean_max_power", mm.power);
  row("eta_at_mean_max_power", mm.efficiency);
  row("tau1_at_mean_max_power", mm.tau1);
  row("tau3_at_mean_max_power", mm.tau3);
  row("points", static_cast<double>(r.points.size()));
  row("valid_points", static_cast<double>(valid));
  row("stalled_points", static_cast<double>(stalled));
  row("invalid_points", static_cast<double>(invalid));
  row("frontier_points", static_cast<double>(r.frontier.size()));
  row("failures", static_cast<double>(r.failures.size()));
  csv.summary = std::move(s);
  return csv;
}

int run(int argc, char** argv) {
  CLI::App app{"Finite-time quantum Otto engines: extra work, cycle sweeps and checks"};
  app.name("otto");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, preset_name, out_dir;
  unsigned threads = 0;
  auto* config_opt = app.add_option("--config", config_path, "YAML configuration file");
  auto* preset_opt = app.add_option("--preset", preset_name, "Built-in configuration")
                         ->check(CLI::IsMember(preset_names()));
  config_opt->excludes(preset_opt);
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  app.add_option("--threads", threads, "Worker threads for sweeps (0: all cores)");

  auto* adiabat = app.add_subcommand("adiabat", "Extra work of one stroke versus control time");
  std::string stroke_text = "12", taus_text;
  adiabat->add_option("--stroke", stroke_text, "12 or 34")->check(CLI::IsMember({"12", "34"}));
  adiabat->add_option("--taus", taus_text, "Comma-separated control times");

  auto* sweep = app.add_subcommand("sweep", "Power-efficiency cloud over the (tau1, tau3) grid");

  auto* protocol = app.add_subcommand("protocol", "Sample a stroke's schedule");
  int samples = 201;
  protocol->add_option("--stroke", stroke_text, "12 or 34")->check(CLI::IsMember({"12", "34"}));
  protocol->add_option("--samples", samples, "Number of s samples")->check(CLI::Range(2, 1000000));

  auto* validate_cmd = app.add_subcommand("validate", "Run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    std::vector<RunConfig> configs;
    if (!config_path.empty()) {
      configs.push_back(load_config(config_path));
    } else if (!preset_name.empty()) {
      configs.push_back(preset(preset_name));
    } else if (validate_cmd->parsed()) {
      configs.push_back(preset("two_level_paper"));
      configs.push_back(preset("oscillator_paper"));
    } else {
      std::cerr << "otto: one of --config or --preset is required\n";
      return kConfigError;
    }

    auto out_path = [&](const RunConfig& c) {
      std::filesystem::path dir = out_dir.empty() ? c.output_dir : out_dir;
      std::filesystem::create_directories(dir);
      return dir;
    };

    if (validate_cmd->parsed()) {
      bool ok = true;
      for (const auto& c : configs) {
        const auto report = validate(c, threads);
        std::cout << report.render();
        ok = ok && report.passed();
      }
      std::cout << (ok ? "validate: all checks passed\n" : "validate: FAILED\n");
      return ok ? kOk : kValidationFailure;
    }

    const RunConfig& config = configs.front();
    const auto stroke = parse_stroke(stroke_text);
    if (adiabat->parsed()) {
      const auto taus =
          taus_text.empty() ? default_adiabat_taus(config, stroke) : parse_tau_list(taus_text);
      const auto path = out_path(config) / fmt::format("adiabat_{}.csv", stroke_text);
      write_file(path, adiabat_csv(config, stroke, taus));
      std::cout << fmt::format("wrote {} ({} rows)\n", path.string(), taus.size());
    } else if (protocol->parsed()) {
      const auto path = out_path(config) / fmt::format("protocol_{}.csv", stroke_text);
      write_file(path, protocol_csv(config, stroke, samples));
      std::cout << fmt::format("wrote {} ({} rows)\n", path.string(), samples);
    } else if (sweep->parsed()) {
      engine::SweepOptions opts;
      opts.threads = threads;
      const auto result = engine::sweep(config.spec, opts);
      const auto csv = sweep_csv(config, result);
      const auto dir = out_path(config);
      write_file(dir / "sweep_cloud.csv", csv.cloud);
      write_file(dir / "sweep_frontier.csv", csv.frontier);
      write_file(dir / "sweep_mean_cloud.csv", csv.mean_cloud);
      write_file(dir / "sweep_summary.csv", csv.summary);
      std::cout << fmt::format(
          "wrote {} ({} x {} grid)\nmax power {:.6g} at tau1 = {:.6g}, tau3 = {:.6g}, eta = "
          "{:.6g}\neta_adi {:.6g}, mean-only max power {:.6g}, eta_emp {}\n",
          dir.string(), result.tau1_values.size(), result.tau3_values.size(),
          result.max_power_point.power, result.max_power_point.tau1,
          result.max_power_point.tau3, result.max_power_point.efficiency,
          result.quasistatic.eta_adi, result.mean_max_power_point.power,
          result.eta_emp_model ? fmt::format("{:.6g}", *result.eta_emp_model) : "n/a");
      if (!result.failures.empty()) {
        std::cerr << fmt::format("otto: {} stroke evaluations failed (see sweep_summary.csv)\n",
                                 result.failures.size());
        return kNumericalError;
      }
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "otto: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "otto: invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "otto: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "otto: numerical error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace otto::cli
