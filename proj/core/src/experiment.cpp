#include "atom/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace atom {

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunSinks& sinks) {
  Simulation sim(cfg);
  sim.set_trace(sinks.trace);
  sim.set_snapshot_sink(sinks.snapshots);
  sim.run_to_end();

  ExperimentReport report;
  report.config = cfg;
  report.probes = sim.probes();
  for (const ProbeRecord& p : report.probes) report.totals += p.counts;
  report.precision = precision(report.totals);
  report.recall = recall(report.totals);
  report.trace = sim.summary();
  report.churn_events = sim.churn_events();
  report.disconnects = sim.disconnects().size();
  report.ledger = sim.ledger();
  return report;
}

SweepResult run_sweep(const std::vector<ExperimentConfig>& grid, std::size_t repeats, std::size_t jobs) {
  if (grid.empty()) throw std::invalid_argument("EmptySweep: grid is empty");
  if (repeats == 0) throw std::invalid_argument("EmptySweep: repeats must be positive");

  const std::size_t total = grid.size() * repeats;
  std::vector<std::optional<ExperimentReport>> slots(total);
  std::vector<std::string> errors(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      ExperimentConfig cfg = grid[i / repeats];
      cfg.seed += i % repeats;
      try {
        slots[i] = run_experiment(cfg);
      } catch (const std::exception& e) {
        errors[i] = "var=" + format_number(cfg.variability_s) + " malicious=" + format_number(cfg.malicious_pct * 100) +
                    " seed=" + std::to_string(cfg.seed) + ": " + e.what();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, total);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult result;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SummaryRow row;
    row.variability_s = grid[g].variability_s;
    row.malicious_pct = grid[g].malicious_pct;
    for (std::size_t r = 0; r < repeats; ++r) {
      const std::size_t i = g * repeats + r;
      if (slots[i]) {
        row.totals += slots[i]->totals;
        ++row.runs;
        result.reports.push_back(std::move(*slots[i]));
      } else {
        result.errors.push_back(errors[i]);
      }
    }
    row.precision = precision(row.totals);
    row.recall = recall(row.totals);
    result.summary.push_back(row);
  }
  return result;
}

std::vector<ExperimentConfig> default_grid(const ExperimentConfig& base) {
  std::vector<ExperimentConfig> grid;
  for (double var : {10.0, 5.0, 1.0}) {
    for (double pct : {0.0, 0.05, 0.10, 0.20, 0.30, 0.40, 0.50}) {
      ExperimentConfig cfg = base;
      cfg.variability_s = var;
      cfg.malicious_pct = pct;
      grid.push_back(cfg);
    }
  }
  return grid;
}

std::string format_percent(const std::optional<double>& ratio) {
  if (!ratio) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *ratio * 100.0);
  return buf;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void write_probe_header(std::ostream& out) {
  out << "var_s,malicious_pct,seed,probe_time_ms,tp,fp,fn,precision,recall\n";
}

void write_probe_rows(std::ostream& out, const ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  for (const ProbeRecord& p : report.probes) {
    out << format_number(cfg.variability_s) << ',' << format_number(cfg.malicious_pct * 100.0) << ',' << cfg.seed
        << ',' << p.time.count() << ',' << p.counts.tp << ',' << p.counts.fp << ',' << p.counts.fn << ','
        << format_percent(precision(p.counts)) << ',' << format_percent(recall(p.counts)) << '\n';
  }
}

void write_run_header(std::ostream& out) { out << "var_s,malicious_pct,seed,tp,fp,fn,precision,recall\n"; }

void write_run_row(std::ostream& out, const ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  out << format_number(cfg.variability_s) << ',' << format_number(cfg.malicious_pct * 100.0) << ',' << cfg.seed << ','
      << report.totals.tp << ',' << report.totals.fp << ',' << report.totals.fn << ','
      << format_percent(report.precision) << ',' << format_percent(report.recall) << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "var_s,malicious_pct,runs,tp,fp,fn,precision,recall\n";
  for (const SummaryRow& r : rows) {
    out << format_number(r.variability_s) << ',' << format_number(r.malicious_pct * 100.0) << ',' << r.runs << ','
        << r.totals.tp << ',' << r.totals.fp << ',' << r.totals.fn << ',' << format_percent(r.precision) << ','
        << format_percent(r.recall) << '\n';
  }
}

void write_table_csv(std::ostream& out, const std::vector<SummaryRow>& rows, TableMetric metric) {
  std::vector<double> vars;
  std::vector<double> pcts;
  for (const SummaryRow& r : rows) {
    if (std::find(vars.begin(), vars.end(), r.variability_s) == vars.end()) vars.push_back(r.variability_s);
    if (std::find(pcts.begin(), pcts.end(), r.malicious_pct) == pcts.end()) pcts.push_back(r.malicious_pct);
  }
  out << "var_s";
  for (double p : pcts) out << ',' << format_number(p * 100.0) << '%';
  out << '\n';
  for (double v : vars) {
    out << format_number(v);
    for (double p : pcts) {
      out << ',';
      for (const SummaryRow& r : rows) {
        if (r.variability_s == v && r.malicious_pct == p) {
          out << format_percent(metric == TableMetric::Precision ? r.precision : r.recall);
          break;
        }
      }
    }
    out << '\n';
  }
}

}  // namespace atom
