#pragma once

#include "gbrtune/report.hpp"
#include "gbrtune/simulator.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gbrtune {

/// Exit statuses shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitUsage = 2,
};

struct TechniqueSummary {
  Technique technique = Technique::Max;
  double total_cost = 0.0;
  double over_magnitude = 0.0;
  std::size_t over_count = 0;
  double under_magnitude = 0.0;
  std::size_t under_count = 0;
  double savings_vs_static = 0.0;
  double data_loss_bits = 0.0;
};

struct CompareReport {
  /// Ordered by technique name.
  std::vector<TechniqueSummary> techniques;
  /// Ascending total cost, ties broken by technique name.
  std::vector<Technique> ranking;
};

inline constexpr std::size_t kPlotMetricsPerTechnique = 7;

CompareReport build_compare_report(const std::vector<SimulationResult>& results);
Json to_json(const CompareReport& report);
/// `technique,metric,value` rows, seven per technique, after a header line.
void write_plot_csv(std::ostream& out, const CompareReport& report);

/// Command-line overrides applied on top of a simulation config file.
struct SimOverrides {
  std::optional<double> interval;
  std::optional<std::size_t> window_t;
  std::optional<double> p_u;
  std::optional<double> p_o;
  std::optional<double> capacity;
  std::optional<std::size_t> warmup;
  std::optional<std::string> technique;
};

struct GenerateOptions {
  std::optional<std::string> config_path;
  long long count = 1;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

struct SimulateOptions {
  std::vector<std::string> trace_paths;
  std::optional<std::string> config_path;
  std::string out_path;
  std::optional<std::string> qos_log_path;
  SimOverrides overrides;
};

struct CompareOptions {
  std::vector<std::string> trace_paths;
  std::optional<std::string> config_path;
  std::vector<std::string> techniques;
  std::string out_path;
  std::optional<std::string> plot_csv_path;
  SimOverrides overrides;
};

/// File `stream_<i>.csv` in `out_dir` is generated with seed base + i.
void cmd_generate(const GenerateOptions& opts);
SimulationResult cmd_simulate(const SimulateOptions& opts);
CompareReport cmd_compare(const CompareOptions& opts);

SimConfig load_sim_config(const std::optional<std::string>& path, const SimOverrides& overrides);

/// Parses arguments and dispatches; errors are printed as one line on `err`
/// and mapped to an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gbrtune
