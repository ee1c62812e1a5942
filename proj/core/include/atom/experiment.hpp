#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atom/config.hpp"
#include "atom/metrics.hpp"
#include "atom/simulation.hpp"

namespace atom {

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ProbeRecord> probes;
  ConfusionCounts totals;  // sum over probes
  std::optional<double> precision;
  std::optional<double> recall;
  TraceSummary trace;
  std::uint64_t churn_events = 0;
  std::uint64_t disconnects = 0;
  OverheadLedger ledger;
};

struct RunSinks {
  std::ostream* trace = nullptr;
  std::ostream* snapshots = nullptr;
};

// Builds the network, runs it for duration_ms and probes the global
// snapshot every probe_every_ms. Throws ConfigError on a bad config.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunSinks& sinks = {});

struct SummaryRow {
  double variability_s = 0;
  double malicious_pct = 0;
  std::size_t runs = 0;
  ConfusionCounts totals;
  std::optional<double> precision;
  std::optional<double> recall;
};

struct SweepResult {
  std::vector<ExperimentReport> reports;  // grid order, repeats innermost
  std::vector<SummaryRow> summary;        // one per grid entry
  std::vector<std::string> errors;
};

// Runs every grid entry `repeats` times with seeds seed, seed+1, ...
// A failing run is recorded in `errors` and the sweep carries on. Throws
// std::invalid_argument for an empty grid or zero repeats.
SweepResult run_sweep(const std::vector<ExperimentConfig>& grid, std::size_t repeats, std::size_t jobs = 1);

// Default grid: variability {10, 5, 1} x malicious {0..50%}.
std::vector<ExperimentConfig> default_grid(const ExperimentConfig& base);

// Percent with one decimal, or "NA".
std::string format_percent(const std::optional<double>& ratio);
// Compact decimal for parameters such as var and malicious %.
std::string format_number(double value);

void write_probe_header(std::ostream& out);
void write_probe_rows(std::ostream& out, const ExperimentReport& report);
// One row per run, totals over its probes.
void write_run_header(std::ostream& out);
void write_run_row(std::ostream& out, const ExperimentReport& report);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
// Wide table: one row per variability, one column per malicious %.
enum class TableMetric { Precision, Recall };
void write_table_csv(std::ostream& out, const std::vector<SummaryRow>& rows, TableMetric metric);

}  // namespace atom
