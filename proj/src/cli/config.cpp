#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <variant>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "otto/cli.hpp"
#include "otto/errors.hpp"

namespace otto::cli {

namespace {

constexpr std::string_view kTwoLevelPaper = R"(name: two_level_paper
medium:
  type: two_level
  epsilon: 1.0
  theta: 0.4
  lambda0: 0.1
  lambda1: 0.8
baths:
  t_hot: 5.0
  t_cold: 2.0
schedule:
  stroke12: linear
  stroke34: linear
grid:
  tau1: {min: 1.0, max: 50.0, count: 200, spacing: linear}
  tau3: {min: 1.0, max: 50.0, count: 200, spacing: linear}
tolerances:
  rel: 1.0e-10
  abs: 1.0e-12
  max_steps: 2000000
output:
  dir: out/two_level_paper
)";

constexpr std::string_view kTwoLevelPaperSpecial = R"(name: two_level_paper_special
medium:
  type: two_level
  epsilon: 1.0
  theta: 0.4
  lambda0: 0.1
  lambda1: 0.8
baths:
  t_hot: 5.0
  t_cold: 2.0
schedule:
  stroke12: special
  stroke34: special
grid:
  tau1: {min: 1.0, max: 50.0, count: 200, spacing: linear}
  tau3: {min: 1.0, max: 50.0, count: 200, spacing: linear}
tolerances:
  rel: 1.0e-10
  abs: 1.0e-12
  max_steps: 2000000
output:
  dir: out/two_level_paper_special
)";

constexpr std::string_view kOscillatorPaper = R"(name: oscillator_paper
medium:
  type: oscillator
  omega0: 2.0
  omega1: 1.0
  mass: 1.0
baths:
  t_hot: 5.0
  t_cold: 2.0
schedule:
  stroke12: linear
  stroke34: linear
grid:
  tau1: {min: 0.5, max: 25.0, count: 200, spacing: linear}
  tau3: {min: 0.5, max: 25.0, count: 200, spacing: linear}
tolerances:
  rel: 1.0e-10
  abs: 1.0e-12
  max_steps: 2000000
output:
  dir: out/oscillator_paper
)";

constexpr std::string_view kOscillatorPaperSpecial = R"(name: oscillator_paper_special
medium:
  type: oscillator
  omega0: 2.0
  omega1: 1.0
  mass: 1.0
baths:
  t_hot: 5.0
  t_cold: 2.0
schedule:
  stroke12: special
  stroke34: special
grid:
  tau1: {min: 0.5, max: 25.0, count: 200, spacing: linear}
  tau3: {min: 0.5, max: 25.0, count: 200, spacing: linear}
tolerances:
  rel: 1.0e-10
  abs: 1.0e-12
  max_steps: 2000000
output:
  dir: out/oscillator_paper_special
)";

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const {
    const YAML::Mark mark = at.IsDefined() ? at.Mark() : YAML::Mark::null_mark();
    if (mark.is_null()) throw ConfigError(fmt::format("{}: {}", source_, message));
    throw ConfigError(
        fmt::format("{}:{}:{}: {}", source_, mark.line + 1, mark.column + 1, message));
  }

  void expect_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void check_keys(const YAML::Node& map, const std::string& where,
                  const std::set<std::string>& allowed) const {
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(kv.first, fmt::format("unknown key '{}' in {} (expected one of: {})", key, where,
                                   list));
      }
    }
  }

  YAML::Node require(const YAML::Node& map, const std::string& key,
                     const std::string& where) const {
    YAML::Node child = map[key];
    if (!child.IsDefined() || child.IsNull()) {
      fail(map, fmt::format("missing required key '{}' in {}", key, where));
    }
    return child;
  }

  double number(const YAML::Node& node, const std::string& name) const {
    if (!node.IsScalar()) fail(node, name + " must be a number");
    double v = 0.0;
    try {
      v = node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, fmt::format("{} must be a number (got '{}')", name, node.Scalar()));
    }
    if (!std::isfinite(v)) fail(node, name + " must be finite");
    return v;
  }

  double number_or(const YAML::Node& map, const std::string& key, double fallback,
                   const std::string& where) const {
    YAML::Node child = map[key];
    if (!child.IsDefined() || child.IsNull()) return fallback;
    return number(child, where + "." + key);
  }

  double positive(const YAML::Node& map, const std::string& key, double fallback,
                  const std::string& where) const {
    const double v = number_or(map, key, fallback, where);
    if (!(v > 0)) fail(map[key].IsDefined() ? map[key] : map, where + "." + key + " must be > 0");
    return v;
  }

  long long integer(const YAML::Node& node, const std::string& name) const {
    if (!node.IsScalar()) fail(node, name + " must be an integer");
    try {
      return node.as<long long>();
    } catch (const YAML::Exception&) {
      fail(node, fmt::format("{} must be an integer (got '{}')", name, node.Scalar()));
    }
  }

  std::string text(const YAML::Node& node, const std::string& name) const {
    if (!node.IsScalar()) fail(node, name + " must be a string");
    return node.Scalar();
  }

  engine::TauGrid grid(const YAML::Node& node, const std::string& where,
                       engine::TauGrid fallback) const {
    if (!node.IsDefined() || node.IsNull()) return fallback;
    expect_map(node, where);
    check_keys(node, where, {"min", "max", "count", "spacing"});
    engine::TauGrid g = fallback;
    g.min = positive(node, "min", fallback.min, where);
    g.max = positive(node, "max", fallback.max, where);
    if (node["count"].IsDefined()) {
      const long long c = integer(node["count"], where + ".count");
      if (c < 1 || c > 100000) fail(node["count"], where + ".count must be in [1, 100000]");
      g.count = static_cast<int>(c);
    }
    if (node["spacing"].IsDefined()) {
      const auto s = text(node["spacing"], where + ".spacing");
      if (s == "linear") {
        g.spacing = engine::Spacing::Linear;
      } else if (s == "log") {
        g.spacing = engine::Spacing::Log;
      } else {
        fail(node["spacing"], where + ".spacing must be 'linear' or 'log'");
      }
    }
    try {
      g.validate();
    } catch (const DomainError& e) {
      fail(node, fmt::format("{}: {}", where, e.what()));
    }
    return g;
  }

  engine::ScheduleKind schedule_kind(const YAML::Node& node, const std::string& name) const {
    const auto s = text(node, name);
    if (s == "linear") return engine::ScheduleKind::Linear;
    if (s == "special") return engine::ScheduleKind::Special;
    if (s == "tabulated") return engine::ScheduleKind::Tabulated;
    fail(node, name + " must be 'linear', 'special' or 'tabulated'");
  }

  std::vector<std::pair<double, double>> table(const YAML::Node& node,
                                               const std::string& name) const {
    if (!node.IsSequence()) fail(node, name + " must be a list of [s, value] pairs");
    std::vector<std::pair<double, double>> out;
    for (const auto& row : node) {
      if (!row.IsSequence() || row.size() != 2) fail(row, name + " entries must be [s, value]");
      out.emplace_back(number(row[0], name + " s"), number(row[1], name + " value"));
    }
    try {
      (void)Schedule::tabulated(out);
    } catch (const DomainError& e) {
      fail(node, fmt::format("{}: {}", name, e.what()));
    }
    return out;
  }

  RunConfig parse(const YAML::Node& root) const {
    if (!root.IsDefined() || root.IsNull()) {
      throw ConfigError(fmt::format("{}: empty configuration", source_));
    }
    expect_map(root, "configuration");
    check_keys(root, "configuration",
               {"name", "medium", "baths", "schedule", "grid", "tolerances", "output"});

    RunConfig cfg;
    cfg.name = root["name"].IsDefined() ? text(root["name"], "name") : "unnamed";

    const YAML::Node medium = require(root, "medium", "configuration");
    expect_map(medium, "medium");
    const auto type = text(require(medium, "type", "medium"), "medium.type");
    engine::TauGrid default_grid;
    if (type == "two_level") {
      check_keys(medium, "medium", {"type", "epsilon", "theta", "lambda0", "lambda1"});
      engine::TwoLevelMedium m;
      m.params.epsilon = positive(medium, "epsilon", m.params.epsilon, "medium");
      m.params.theta = number_or(medium, "theta", m.params.theta, "medium");
      if (!(m.params.theta > 0 && m.params.theta < std::numbers::pi)) {
        fail(medium["theta"].IsDefined() ? medium["theta"] : medium,
             "medium.theta must lie in (0, pi)");
      }
      m.lambda0 = number_or(medium, "lambda0", m.lambda0, "medium");
      m.lambda1 = number_or(medium, "lambda1", m.lambda1, "medium");
      cfg.spec.medium = m;
      default_grid = {1.0, 50.0, 200, engine::Spacing::Linear};
    } else if (type == "oscillator") {
      check_keys(medium, "medium", {"type", "omega0", "omega1", "mass"});
      engine::OscillatorMedium m;
      m.omega0 = positive(medium, "omega0", m.omega0, "medium");
      m.omega1 = positive(medium, "omega1", m.omega1, "medium");
      m.mass = positive(medium, "mass", m.mass, "medium");
      cfg.spec.medium = m;
      default_grid = {0.5, 25.0, 200, engine::Spacing::Linear};
    } else {
      fail(medium["type"], "medium.type must be 'two_level' or 'oscillator'");
    }

    const YAML::Node baths = require(root, "baths", "configuration");
    expect_map(baths, "baths");
    check_keys(baths, "baths", {"t_hot", "t_cold"});
    const double t_hot = number(require(baths, "t_hot", "baths"), "baths.t_hot");
    const double t_cold = number(require(baths, "t_cold", "baths"), "baths.t_cold");
    if (!(t_cold > 0)) fail(baths["t_cold"], "baths.t_cold must be > 0");
    if (!(t_hot > t_cold)) fail(baths, "baths.t_hot must exceed baths.t_cold");
    cfg.spec.baths = BathPair(t_hot, t_cold);

    if (const YAML::Node sched = root["schedule"]; sched.IsDefined() && !sched.IsNull()) {
      expect_map(sched, "schedule");
      check_keys(sched, "schedule", {"stroke12", "stroke34", "table12", "table34"});
      if (sched["stroke12"].IsDefined()) {
        cfg.spec.stroke12.kind = schedule_kind(sched["stroke12"], "schedule.stroke12");
      }
      if (sched["stroke34"].IsDefined()) {
        cfg.spec.stroke34.kind = schedule_kind(sched["stroke34"], "schedule.stroke34");
      }
      if (sched["table12"].IsDefined()) {
        cfg.spec.stroke12.table = table(sched["table12"], "schedule.table12");
      }
      if (sched["table34"].IsDefined()) {
        cfg.spec.stroke34.table = table(sched["table34"], "schedule.table34");
      }
      if (cfg.spec.stroke12.kind == engine::ScheduleKind::Tabulated &&
          cfg.spec.stroke12.table.empty()) {
        fail(sched, "schedule.stroke12 is tabulated but schedule.table12 is missing");
      }
      if (cfg.spec.stroke34.kind == engine::ScheduleKind::Tabulated &&
          cfg.spec.stroke34.table.empty() && cfg.spec.stroke12.table.empty()) {
        fail(sched, "schedule.stroke34 is tabulated but no table is given");
      }
    }

    if (const YAML::Node g = root["grid"]; g.IsDefined() && !g.IsNull()) {
      expect_map(g, "grid");
      check_keys(g, "grid", {"tau1", "tau3"});
      cfg.spec.grid1 = grid(g["tau1"], "grid.tau1", default_grid);
      cfg.spec.grid3 = grid(g["tau3"], "grid.tau3", default_grid);
    } else {
      cfg.spec.grid1 = cfg.spec.grid3 = default_grid;
    }

    if (const YAML::Node tol = root["tolerances"]; tol.IsDefined() && !tol.IsNull()) {
      expect_map(tol, "tolerances");
      check_keys(tol, "tolerances", {"rel", "abs", "max_steps", "initial_step"});
      auto& ic = cfg.spec.integrator;
      ic.rel_tol = positive(tol, "rel", ic.rel_tol, "tolerances");
      ic.abs_tol = positive(tol, "abs", ic.abs_tol, "tolerances");
      ic.initial_step = positive(tol, "initial_step", ic.initial_step, "tolerances");
      if (tol["max_steps"].IsDefined()) {
        const long long n = integer(tol["max_steps"], "tolerances.max_steps");
        if (n < 1) fail(tol["max_steps"], "tolerances.max_steps must be >= 1");
        ic.max_steps = static_cast<std::size_t>(n);
      }
    }

    if (const YAML::Node out = root["output"]; out.IsDefined() && !out.IsNull()) {
      expect_map(out, "output");
      check_keys(out, "output", {"dir"});
      if (out["dir"].IsDefined()) cfg.output_dir = text(out["dir"], "output.dir");
    }

    try {
      cfg.spec.validate();
    } catch (const DomainError& e) {
      fail(medium, e.what());
    }
    return cfg;
  }

 private:
  std::string source_;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string grid_text(const engine::TauGrid& g) {
  return fmt::format("{},{},{},{}", num(g.min), num(g.max), g.count,
                     g.spacing == engine::Spacing::Linear ? "linear" : "log");
}

std::string table_text(const std::vector<std::pair<double, double>>& t) {
  std::string out;
  for (const auto& [s, v] : t) out += fmt::format("{}{}:{}", out.empty() ? "" : ";", num(s), num(v));
  return out;
}

}  // namespace

std::string RunConfig::canonical() const {
  std::string out = fmt::format("name = {}\n", name);
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, engine::TwoLevelMedium>) {
          out += "medium.type = two_level\n";
          out += fmt::format("medium.epsilon = {}\nmedium.theta = {}\n", num(m.params.epsilon),
                             num(m.params.theta));
          out += fmt::format("medium.lambda0 = {}\nmedium.lambda1 = {}\n", num(m.lambda0),
                             num(m.lambda1));
        } else {
          out += "medium.type = oscillator\n";
          out += fmt::format("medium.omega0 = {}\nmedium.omega1 = {}\nmedium.mass = {}\n",
                             num(m.omega0), num(m.omega1), num(m.mass));
        }
      },
      spec.medium);
  out += fmt::format("baths.t_hot = {}\nbaths.t_cold = {}\n", num(spec.baths.t_hot()),
                     num(spec.baths.t_cold()));
  out += fmt::format("schedule.stroke12 = {}\n", engine::to_string(spec.stroke12.kind));
  out += fmt::format("schedule.stroke34 = {}\n", engine::to_string(spec.stroke34.kind));
  if (!spec.stroke12.table.empty()) {
    out += fmt::format("schedule.table12 = {}\n", table_text(spec.stroke12.table));
  }
  if (!spec.stroke34.table.empty()) {
    out += fmt::format("schedule.table34 = {}\n", table_text(spec.stroke34.table));
  }
  out += fmt::format("grid.tau1 = {}\ngrid.tau3 = {}\n", grid_text(spec.grid1),
                     grid_text(spec.grid3));
  const auto& ic = spec.integrator;
  out += fmt::format("tolerances.rel = {}\ntolerances.abs = {}\n", num(ic.rel_tol),
                     num(ic.abs_tol));
  out += fmt::format("tolerances.max_steps = {}\ntolerances.initial_step = {}\n", ic.max_steps,
                     num(ic.initial_step));
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("{}:{}:{}: {}", source, e.mark.line + 1, e.mark.column + 1,
                                  e.msg));
  }
  return Parser(source).parse(root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open configuration file", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::vector<std::string> preset_names() {
  return {"two_level_paper", "two_level_paper_special", "oscillator_paper",
          "oscillator_paper_special"};
}

std::string preset_yaml(std::string_view name) {
  if (name == "two_level_paper") return std::string(kTwoLevelPaper);
  if (name == "two_level_paper_special") return std::string(kTwoLevelPaperSpecial);
  if (name == "oscillator_paper") return std::string(kOscillatorPaper);
  if (name == "oscillator_paper_special") return std::string(kOscillatorPaperSpecial);
  std::string list;
  for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
  throw ConfigError(fmt::format("unknown preset '{}' (available: {})", name, list));
}

RunConfig preset(std::string_view name) {
  return parse_config(preset_yaml(name), fmt::format("preset:{}", name));
}

}  // namespace otto::cli
