// atom-sim: runs AToM topology-monitoring experiments on a simulated overlay.
//
//   atom-sim run --var 10 --malicious 0.2 --seed 42 --out results/
//   atom-sim sweep --repeats 5 --out results/
//   atom-sim audit-overhead --nodes 10 --monitors 4
//   atom-sim export-topology --format dot --at 60000

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "atom/config.hpp"
#include "atom/experiment.hpp"
#include "atom/metrics.hpp"
#include "atom/simulation.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> settings;
};

// Registers one flag per protocol parameter. Values are kept as strings and
// applied on top of the config file, so flags always win.
void add_parameter_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_file, "key = value configuration file")->check(CLI::ExistingFile);
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"nodes", "Target number of reachable nodes (50)"},
      {"monitors", "Number of monitors (4)"},
      {"outbound", "Outbound connections per node (3)"},
      {"var", "Network variability: mean seconds between churn events (10)"},
      {"malicious", "Fraction of malicious nodes in [0,1] (0)"},
      {"duration-ms", "Simulated duration (600000)"},
      {"probe-every-ms", "Probe interval (30000)"},
      {"timeout", "PeeV timeout in ms (1000)"},
      {"f-init", "Initial scan frequency in seconds (5)"},
      {"f-min", "Minimum scan frequency in seconds (1)"},
      {"f-max", "Maximum scan frequency in seconds (10)"},
      {"safe-rounds", "Rounds per monitor before reputation applies (3)"},
      {"scheduling", "poisson | fixed (poisson)"},
      {"seed", "Base RNG seed (1)"},
      {"latency-lo-ms", "Minimum per-link latency (5)"},
      {"latency-hi-ms", "Maximum per-link latency (50)"},
      {"churn", "Enable churn (true)"},
      {"adversary", "worst-case | behavior-N (worst-case)"},
      {"full-hiding", "Worst-case colluders also hide their honest outbound links (false)"},
  };
  for (const auto& [name, help] : flags) {
    std::string key = name;
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    app->add_option_function<std::string>(
        "--" + name, [&o, key](const std::string& v) { o.settings.emplace_back(key, v); }, help);
  }
}

atom::ExperimentConfig build_config(const Overrides& o) {
  atom::ExperimentConfig cfg;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    atom::load_config(cfg, in);
  }
  for (const auto& [k, v] : o.settings) atom::apply_setting(cfg, k, v);
  atom::require_valid(cfg);
  return cfg;
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ATOM_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "atom-out";
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

int cmd_run(const Overrides& o, const std::string& out_flag, bool trace, bool snapshots) {
  const atom::ExperimentConfig cfg = build_config(o);
  const fs::path dir = output_dir(out_flag);
  fs::create_directories(dir);

  std::ofstream trace_out;
  std::ofstream snap_out;
  atom::RunSinks sinks;
  if (trace) {
    trace_out = open_out(dir / "trace.tsv");
    trace_out << "time_ms\tevent_kind\tfrom\tto\tdetail\n";
    sinks.trace = &trace_out;
  }
  if (snapshots) {
    snap_out = open_out(dir / "snapshots.tsv");
    snap_out << "time_ms\tsource\tfrom\tto\n";
    sinks.snapshots = &snap_out;
  }
  const atom::ExperimentReport report = atom::run_experiment(cfg, sinks);

  auto probes = open_out(dir / "probes.csv");
  atom::write_probe_header(probes);
  atom::write_probe_rows(probes, report);
  auto runs = open_out(dir / "runs.csv");
  atom::write_run_header(runs);
  atom::write_run_row(runs, report);

  atom::SummaryRow row{cfg.variability_s, cfg.malicious_pct, 1, report.totals, report.precision, report.recall};
  auto summary = open_out(dir / "summary.csv");
  atom::write_summary_csv(summary, {row});
  {
    auto cfg_out = open_out(dir / "config.txt");
    atom::write_config(cfg, cfg_out);
  }

  std::cout << "var=" << atom::format_number(cfg.variability_s)
            << " malicious=" << atom::format_number(cfg.malicious_pct * 100) << "% seed=" << cfg.seed
            << " precision=" << atom::format_percent(report.precision)
            << " recall=" << atom::format_percent(report.recall) << " (tp=" << report.totals.tp
            << " fp=" << report.totals.fp << " fn=" << report.totals.fn << ", churn events=" << report.churn_events
            << ", reputation disconnects=" << report.disconnects << ")\n"
            << "wrote " << dir.string() << "/\n";
  return 0;
}

int cmd_sweep(const Overrides& o, const std::string& out_flag, std::size_t repeats, std::size_t jobs,
              const std::string& vars, const std::string& levels) {
  const atom::ExperimentConfig base = build_config(o);
  std::vector<atom::ExperimentConfig> grid;
  if (vars.empty() && levels.empty()) {
    grid = atom::default_grid(base);
  } else {
    const std::vector<double> vs = vars.empty() ? std::vector<double>{10, 5, 1} : parse_list(vars);
    const std::vector<double> ls =
        levels.empty() ? std::vector<double>{0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5} : parse_list(levels);
    for (double v : vs) {
      for (double l : ls) {
        atom::ExperimentConfig cfg = base;
        cfg.variability_s = v;
        cfg.malicious_pct = l;
        grid.push_back(cfg);
      }
    }
  }
  const atom::SweepResult result = atom::run_sweep(grid, repeats, jobs);

  const fs::path dir = output_dir(out_flag);
  fs::create_directories(dir);
  auto probes = open_out(dir / "probes.csv");
  atom::write_probe_header(probes);
  for (const auto& r : result.reports) atom::write_probe_rows(probes, r);
  auto runs = open_out(dir / "runs.csv");
  atom::write_run_header(runs);
  for (const auto& r : result.reports) atom::write_run_row(runs, r);
  auto summary = open_out(dir / "summary.csv");
  atom::write_summary_csv(summary, result.summary);
  auto ptable = open_out(dir / "precision_table.csv");
  atom::write_table_csv(ptable, result.summary, atom::TableMetric::Precision);
  auto rtable = open_out(dir / "recall_table.csv");
  atom::write_table_csv(rtable, result.summary, atom::TableMetric::Recall);

  std::cout << "precision (%)\n";
  atom::write_table_csv(std::cout, result.summary, atom::TableMetric::Precision);
  std::cout << "recall (%)\n";
  atom::write_table_csv(std::cout, result.summary, atom::TableMetric::Recall);
  std::cout << "wrote " << dir.string() << "/\n";

  for (const auto& e : result.errors) std::cerr << "run failed: " << e << '\n';
  return result.errors.empty() ? 0 : 1;
}

int cmd_audit(const Overrides& o) {
  atom::ExperimentConfig cfg = build_config(o);
  cfg.churn = false;
  cfg.single_sweep = true;
  cfg.malicious_pct = 0.0;
  atom::Simulation sim(cfg);
  sim.run_to_end();
  const atom::AuditReport report = atom::audit_overhead(sim.ledger(), sim.topology(), cfg.monitors);
  std::cout << "node,out,in,expected,measured\n";
  for (atom::NodeId n : sim.topology().peers()) {
    const auto out = sim.topology().peer_outbound(n).size();
    const auto in = sim.topology().peer_inbound(n).size();
    std::cout << n << ',' << out << ',' << in << ',' << atom::expected_overhead(out, in, cfg.monitors) << ','
              << sim.ledger().get(n).peev_messages() << '\n';
  }
  std::cout << "checked " << report.nodes_checked << " nodes, " << report.discrepancies.size() << " discrepancies\n";
  return report.clean() ? 0 : 1;
}

int cmd_export(const Overrides& o, const std::string& format, std::int64_t at_ms, const std::string& out_file) {
  atom::ExperimentConfig cfg = build_config(o);
  atom::Simulation sim(cfg);
  if (at_ms > 0) sim.run_until(atom::SimTime{std::min(at_ms, cfg.duration_ms)});
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_file.empty()) {
    file = open_out(out_file);
    out = &file;
  }
  if (format == "dot") {
    sim.topology().write_dot(*out);
  } else {
    sim.topology().write_edge_list(*out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AToM active topology monitoring simulator"};
  app.require_subcommand(1);

  Overrides run_o, sweep_o, audit_o, export_o;
  std::string run_out, sweep_out, export_file, export_format = "edges", vars, levels;
  bool trace = false, snapshots = false;
  std::size_t repeats = 5, jobs = 1;
  std::int64_t at_ms = 0;

  auto* run = app.add_subcommand("run", "Run one experiment and write probe/summary CSVs");
  add_parameter_flags(run, run_o);
  run->add_option("--out", run_out, "Output directory (default $ATOM_OUT_DIR or ./atom-out)");
  run->add_flag("--trace", trace, "Write the per-event trace log");
  run->add_flag("--snapshots", snapshots, "Write local and global snapshots at each probe");

  auto* sweep = app.add_subcommand("sweep", "Run the variability x malicious-percentage grid");
  add_parameter_flags(sweep, sweep_o);
  sweep->add_option("--out", sweep_out, "Output directory (default $ATOM_OUT_DIR or ./atom-out)");
  sweep->add_option("--repeats", repeats, "Runs per grid cell, seeds seed..seed+repeats-1")->capture_default_str();
  sweep->add_option("--jobs", jobs, "Parallel runs")->capture_default_str();
  sweep->add_option("--vars", vars, "Comma-separated variability values (default 10,5,1)");
  sweep->add_option("--levels", levels, "Comma-separated malicious fractions (default 0,.05,.1,.2,.3,.4,.5)");

  auto* audit = app.add_subcommand("audit-overhead", "Check per-node message counts after one complete round");
  add_parameter_flags(audit, audit_o);

  auto* exp = app.add_subcommand("export-topology", "Write the ground-truth overlay as an edge list or DOT");
  add_parameter_flags(exp, export_o);
  exp->add_option("--format", export_format, "edges | dot")->check(CLI::IsMember({"edges", "dot"}));
  exp->add_option("--at", at_ms, "Simulated time (ms) at which to export; 0 = initial topology");
  exp->add_option("--file", export_file, "Write to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_o, run_out, trace, snapshots);
    if (sweep->parsed()) return cmd_sweep(sweep_o, sweep_out, repeats, jobs, vars, levels);
    if (audit->parsed()) return cmd_audit(audit_o);
    if (exp->parsed()) return cmd_export(export_o, export_format, at_ms, export_file);
  } catch (const atom::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
