#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "atom/adversary.hpp"
#include "atom/monitor.hpp"

namespace atom {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  [[nodiscard]] const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

struct ExperimentConfig {
  std::size_t nodes = 50;
  std::size_t monitors = 4;
  std::size_t outbound_per_node = 3;
  double variability_s = 10.0;
  double malicious_pct = 0.0;  // fraction in [0, 1]
  std::int64_t duration_ms = 600'000;
  std::int64_t probe_every_ms = 30'000;
  std::int64_t peev_timeout_ms = 1'000;
  int f_init = 5;
  int f_min = 1;
  int f_max = 10;
  int safe_rounds = 3;
  SchedulingMode scheduling = SchedulingMode::Poisson;
  std::uint64_t seed = 1;
  std::int64_t latency_lo_ms = 5;
  std::int64_t latency_hi_ms = 50;
  // Monitors add target->P as soon as P's matching marker arrives instead
  // of waiting for the round to time out.
  bool accept_on_receipt = true;

  // Harness switches, not protocol parameters.
  bool churn = true;
  bool single_sweep = false;  // each monitor scans each node exactly once
  AdversaryPolicy::Mode adversary_mode = AdversaryPolicy::Mode::WorstCase;
  int adversary_behavior = 6;
  // Worst-case colluders also drop monitor markers towards honest outbound
  // peers, hiding those connections too.
  bool full_hiding = false;
  // Optional per-monitor frequency bounds; empty means f_init/f_min/f_max
  // for every monitor.
  std::vector<FrequencyBounds> monitor_bounds;

  [[nodiscard]] Duration variability() const;
  [[nodiscard]] FrequencyBounds bounds_for(std::size_t monitor_index) const;
};

// Empty when the config is usable.
std::vector<std::string> validate(const ExperimentConfig& cfg);
void require_valid(const ExperimentConfig& cfg);

// key = value, '#' comments. Keys are the field names above plus the
// aliases used by the CLI flags (var, malicious, timeout, ...).
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void load_config(ExperimentConfig& cfg, std::istream& in);
void write_config(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace atom
