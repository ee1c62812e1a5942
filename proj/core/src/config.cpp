#include "atom/config.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace atom {

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out = "invalid configuration";
  for (const auto& l : lines) out += "\n  " + l;
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) throw ConfigError({key + ": cannot parse '" + value + "'"});
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ConfigError({key + ": expected a boolean, got '" + value + "'"});
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

Duration ExperimentConfig::variability() const {
  return Duration{static_cast<std::int64_t>(std::llround(variability_s * 1000.0))};
}

FrequencyBounds ExperimentConfig::bounds_for(std::size_t monitor_index) const {
  if (monitor_index < monitor_bounds.size()) return monitor_bounds[monitor_index];
  return FrequencyBounds{f_init, f_min, f_max};
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> d;
  if (cfg.outbound_per_node == 0) d.emplace_back("outbound_per_node: must be positive");
  if (cfg.nodes <= cfg.outbound_per_node) d.emplace_back("nodes: must exceed outbound_per_node");
  if (cfg.churn && cfg.variability_s <= 0.0) d.emplace_back("variability_s: must be positive");
  if (cfg.malicious_pct < 0.0 || cfg.malicious_pct > 1.0) d.emplace_back("malicious_pct: must lie in [0, 1]");
  if (cfg.duration_ms <= 0) d.emplace_back("duration_ms: must be positive");
  if (cfg.probe_every_ms <= 0) d.emplace_back("probe_every_ms: must be positive");
  if (cfg.probe_every_ms > cfg.duration_ms) d.emplace_back("probe_every_ms: must not exceed duration_ms");
  if (cfg.peev_timeout_ms <= 0) d.emplace_back("peev_timeout_ms: must be positive");
  if (cfg.f_min < 1) d.emplace_back("f_min: must be at least 1");
  if (!(cfg.f_min <= cfg.f_init && cfg.f_init <= cfg.f_max)) d.emplace_back("f_init: need f_min <= f_init <= f_max");
  if (cfg.safe_rounds < 0) d.emplace_back("safe_rounds: must be non-negative");
  if (cfg.latency_lo_ms < 0 || cfg.latency_hi_ms < cfg.latency_lo_ms) {
    d.emplace_back("latency: need 0 <= lo <= hi");
  }
  if (cfg.latency_hi_ms * 3 >= cfg.peev_timeout_ms) {
    d.emplace_back("latency: three hops must fit inside the PeeV timeout");
  }
  if (!behavior_from_int(cfg.adversary_behavior)) d.emplace_back("adversary_behavior: must be 1..6");
  if (!cfg.monitor_bounds.empty() && cfg.monitor_bounds.size() != cfg.monitors) {
    d.emplace_back("monitor_bounds: need one entry per monitor");
  }
  for (const auto& b : cfg.monitor_bounds) {
    if (!(1 <= b.min && b.min <= b.initial && b.initial <= b.max)) d.emplace_back("monitor_bounds: need 1 <= min <= initial <= max");
  }
  return d;
}

void require_valid(const ExperimentConfig& cfg) {
  auto d = validate(cfg);
  if (!d.empty()) throw ConfigError(std::move(d));
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "nodes") {
    cfg.nodes = parse_number<std::size_t>(key, value);
  } else if (key == "monitors") {
    cfg.monitors = parse_number<std::size_t>(key, value);
  } else if (key == "outbound_per_node" || key == "outbound") {
    cfg.outbound_per_node = parse_number<std::size_t>(key, value);
  } else if (key == "variability_s" || key == "var") {
    cfg.variability_s = parse_number<double>(key, value);
  } else if (key == "malicious_pct" || key == "malicious") {
    cfg.malicious_pct = parse_number<double>(key, value);
  } else if (key == "duration_ms") {
    cfg.duration_ms = parse_number<std::int64_t>(key, value);
  } else if (key == "probe_every_ms") {
    cfg.probe_every_ms = parse_number<std::int64_t>(key, value);
  } else if (key == "peev_timeout_ms" || key == "timeout") {
    cfg.peev_timeout_ms = parse_number<std::int64_t>(key, value);
  } else if (key == "f_init") {
    cfg.f_init = parse_number<int>(key, value);
  } else if (key == "f_min") {
    cfg.f_min = parse_number<int>(key, value);
  } else if (key == "f_max") {
    cfg.f_max = parse_number<int>(key, value);
  } else if (key == "safe_rounds") {
    cfg.safe_rounds = parse_number<int>(key, value);
  } else if (key == "scheduling_mode" || key == "scheduling") {
    if (value == "poisson") {
      cfg.scheduling = SchedulingMode::Poisson;
    } else if (value == "fixed") {
      cfg.scheduling = SchedulingMode::Fixed;
    } else {
      throw ConfigError({key + ": expected poisson or fixed, got '" + value + "'"});
    }
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "latency_lo_ms") {
    cfg.latency_lo_ms = parse_number<std::int64_t>(key, value);
  } else if (key == "latency_hi_ms") {
    cfg.latency_hi_ms = parse_number<std::int64_t>(key, value);
  } else if (key == "churn") {
    cfg.churn = parse_bool(key, value);
  } else if (key == "single_sweep") {
    cfg.single_sweep = parse_bool(key, value);
  } else if (key == "adversary") {
    if (value == "worst-case") {
      cfg.adversary_mode = AdversaryPolicy::Mode::WorstCase;
    } else if (value.rfind("behavior-", 0) == 0) {
      cfg.adversary_mode = AdversaryPolicy::Mode::Single;
      cfg.adversary_behavior = parse_number<int>(key, value.substr(9));
    } else {
      throw ConfigError({key + ": expected worst-case or behavior-N, got '" + value + "'"});
    }
  } else if (key == "accept_on_receipt") {
    cfg.accept_on_receipt = parse_bool(key, value);
  } else if (key == "full_hiding") {
    cfg.full_hiding = parse_bool(key, value);
  } else {
    throw ConfigError({"unknown key '" + key + "'"});
  }
}

void load_config(ExperimentConfig& cfg, std::istream& in) {
  std::vector<std::string> errors;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      for (const auto& d : e.diagnostics()) errors.push_back("line " + std::to_string(lineno) + ": " + d);
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

void write_config(const ExperimentConfig& cfg, std::ostream& out) {
  out << "nodes = " << cfg.nodes << '\n'
      << "monitors = " << cfg.monitors << '\n'
      << "outbound_per_node = " << cfg.outbound_per_node << '\n'
      << "variability_s = " << cfg.variability_s << '\n'
      << "malicious_pct = " << cfg.malicious_pct << '\n'
      << "duration_ms = " << cfg.duration_ms << '\n'
      << "probe_every_ms = " << cfg.probe_every_ms << '\n'
      << "peev_timeout_ms = " << cfg.peev_timeout_ms << '\n'
      << "f_init = " << cfg.f_init << '\n'
      << "f_min = " << cfg.f_min << '\n'
      << "f_max = " << cfg.f_max << '\n'
      << "safe_rounds = " << cfg.safe_rounds << '\n'
      << "scheduling_mode = " << (cfg.scheduling == SchedulingMode::Poisson ? "poisson" : "fixed") << '\n'
      << "seed = " << cfg.seed << '\n'
      << "latency_lo_ms = " << cfg.latency_lo_ms << '\n'
      << "latency_hi_ms = " << cfg.latency_hi_ms << '\n'
      << "churn = " << (cfg.churn ? "true" : "false") << '\n'
      << "single_sweep = " << (cfg.single_sweep ? "true" : "false") << '\n';
  if (cfg.adversary_mode == AdversaryPolicy::Mode::WorstCase) {
    out << "adversary = worst-case\n";
  } else {
    out << "adversary = behavior-" << cfg.adversary_behavior << '\n';
  }
  out << "accept_on_receipt = " << (cfg.accept_on_receipt ? "true" : "false") << '\n';
  out << "full_hiding = " << (cfg.full_hiding ? "true" : "false") << '\n';
}

}  // namespace atom
