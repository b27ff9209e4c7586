#include "gbrtune/cli.hpp"

#include "gbrtune/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <exception>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace gbrtune {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::vector<BandwidthTrace> load_traces(const std::vector<std::string>& paths) {
  if (paths.empty())
    throw ValidationError("no trace files given");
  std::vector<BandwidthTrace> traces;
  traces.reserve(paths.size());
  for (const auto& p : paths)
    traces.push_back(load_trace_csv(p));
  return traces;
}

void add_sim_flags(CLI::App* cmd, SimOverrides& o) {
  cmd->add_option("--interval", o.interval, "Re-prediction interval in seconds");
  cmd->add_option("--window-t", o.window_t, "Modified-Max lookback in intervals");
  cmd->add_option("--pu", o.p_u, "Undersubscription penalty");
  cmd->add_option("--po", o.p_o, "Oversubscription penalty");
  cmd->add_option("--capacity", o.capacity, "Slice capacity in bits/s");
  cmd->add_option("--warmup", o.warmup, "Warmup intervals excluded from metrics");
}

} // namespace

CompareReport build_compare_report(const std::vector<SimulationResult>& results) {
  CompareReport report;
  for (const auto& r : results) {
    const auto& agg = r.aggregate;
    report.techniques.push_back({r.technique, agg.subscription.total_cost,
                                 agg.subscription.over_magnitude, agg.subscription.over_count,
                                 agg.subscription.under_magnitude, agg.subscription.under_count,
                                 agg.savings_vs_static, agg.data_loss_bits});
  }
  std::sort(report.techniques.begin(), report.techniques.end(), [](const auto& a, const auto& b) {
    return technique_name(a.technique) < technique_name(b.technique);
  });

  std::vector<const TechniqueSummary*> ranked;
  for (const auto& t : report.techniques)
    ranked.push_back(&t);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
    return a->total_cost < b->total_cost;
  });
  for (const auto* t : ranked)
    report.ranking.push_back(t->technique);
  return report;
}

Json to_json(const CompareReport& report) {
  Json doc = Json::object();
  doc["schema"] = kSchemaVersion;
  Json techniques = Json::object();
  for (const auto& t : report.techniques) {
    Json j = Json::object();
    j["total_cost"] = t.total_cost;
    j["over_magnitude"] = t.over_magnitude;
    j["over_count"] = t.over_count;
    j["under_magnitude"] = t.under_magnitude;
    j["under_count"] = t.under_count;
    j["savings_vs_static"] = t.savings_vs_static;
    j["data_loss_bits"] = t.data_loss_bits;
    techniques[std::string(technique_name(t.technique))] = std::move(j);
  }
  doc["techniques"] = std::move(techniques);
  Json ranking = Json::array();
  for (Technique t : report.ranking)
    ranking.push_back(std::string(technique_name(t)));
  doc["ranking"] = std::move(ranking);
  return doc;
}

void write_plot_csv(std::ostream& out, const CompareReport& report) {
  out << "technique,metric,value\n";
  for (const auto& t : report.techniques) {
    const auto name = technique_name(t.technique);
    const std::pair<const char*, double> rows[kPlotMetricsPerTechnique] = {
        {"total_cost", t.total_cost},
        {"over_magnitude", t.over_magnitude},
        {"over_count", static_cast<double>(t.over_count)},
        {"under_magnitude", t.under_magnitude},
        {"under_count", static_cast<double>(t.under_count)},
        {"savings_vs_static", t.savings_vs_static},
        {"data_loss_bits", t.data_loss_bits},
    };
    for (const auto& [metric, value] : rows)
      out << name << ',' << metric << ',' << format_number(value) << '\n';
  }
}

SimConfig load_sim_config(const std::optional<std::string>& path, const SimOverrides& o) {
  SimConfig config = path ? sim_config_from_json(read_json_file(*path)) : SimConfig{};
  if (o.interval)
    config.interval_s = *o.interval;
  if (o.window_t)
    config.predictor.window_t = *o.window_t;
  if (o.p_u)
    config.cost.p_u = *o.p_u;
  if (o.p_o)
    config.cost.p_o = *o.p_o;
  if (o.capacity)
    config.slice_capacity = *o.capacity;
  if (o.warmup)
    config.warmup_intervals = *o.warmup;
  if (o.technique)
    config.predictor.technique = parse_technique(*o.technique);
  config.validate();
  return config;
}

void cmd_generate(const GenerateOptions& opts) {
  if (opts.count < 1)
    throw ValidationError("--count must be >= 1");
  SyntheticTraceConfig config =
      opts.config_path ? synthetic_config_from_json(read_json_file(*opts.config_path))
                       : SyntheticTraceConfig{};
  if (opts.seed)
    config.seed = *opts.seed;
  config.validate();

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec || !fs::is_directory(opts.out_dir))
    throw IoError("cannot create output directory " + opts.out_dir);

  const std::uint64_t base_seed = config.seed;
  for (long long i = 0; i < opts.count; ++i) {
    config.seed = base_seed + static_cast<std::uint64_t>(i);
    const std::string id = "stream_" + std::to_string(i);
    std::ostringstream csv;
    write_trace_csv(csv, generate_synthetic_trace(config, id));
    write_file_atomically((fs::path(opts.out_dir) / (id + ".csv")).string(), csv.str());
  }
}

SimulationResult cmd_simulate(const SimulateOptions& opts) {
  const SimConfig config = load_sim_config(opts.config_path, opts.overrides);
  const auto traces = load_traces(opts.trace_paths);
  SimulationResult result = run_simulation(traces, config);
  write_file_atomically(opts.out_path, dump_json(to_json(result)));
  if (opts.qos_log_path) {
    std::ostringstream log;
    write_qos_log(log, result);
    write_file_atomically(*opts.qos_log_path, log.str());
  }
  return result;
}

CompareReport cmd_compare(const CompareOptions& opts) {
  std::vector<Technique> techniques;
  for (const auto& name : opts.techniques)
    techniques.push_back(parse_technique(name));
  std::sort(techniques.begin(), techniques.end(),
            [](Technique a, Technique b) { return technique_name(a) < technique_name(b); });
  techniques.erase(std::unique(techniques.begin(), techniques.end()), techniques.end());
  if (techniques.size() < 2)
    throw ValidationError("compare needs at least two distinct techniques");

  const SimConfig base = load_sim_config(opts.config_path, opts.overrides);
  const auto traces = load_traces(opts.trace_paths);

  std::vector<SimulationResult> results(techniques.size());
  std::vector<std::exception_ptr> errors(techniques.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(techniques.size()); ++i) {
    try {
      SimConfig config = base;
      config.predictor.technique = techniques[i];
      results[i] = run_simulation(traces, config);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e)
      std::rethrow_exception(e);

  CompareReport report = build_compare_report(results);
  write_file_atomically(opts.out_path, dump_json(to_json(report)));
  if (opts.plot_csv_path) {
    std::ostringstream csv;
    write_plot_csv(csv, report);
    write_file_atomically(*opts.plot_csv_path, csv.str());
  }
  return report;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trace-driven GBR request prediction for network slices"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write synthetic trace CSVs");
  generate->add_option("--config", gen.config_path, "Synthetic trace config (JSON)");
  generate->add_option("--count", gen.count, "Number of streams")->required();
  generate->add_option("--out", gen.out_dir, "Output directory")->required();
  generate->add_option("--seed", gen.seed, "Base seed; stream i uses seed + i");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Replay traces with one technique");
  simulate->add_option("traces", sim.trace_paths, "Trace CSV files")->required();
  simulate->add_option("--config", sim.config_path, "Simulation config (JSON)");
  simulate->add_option("--technique", sim.overrides.technique, "Prediction technique");
  simulate->add_option("--out", sim.out_path, "Result JSON path")->required();
  simulate->add_option("--qos-log", sim.qos_log_path, "QoS request log (JSON Lines)");
  add_sim_flags(simulate, sim.overrides);

  CompareOptions cmp;
  auto* compare = app.add_subcommand("compare", "Run several techniques on the same traces");
  compare->add_option("traces", cmp.trace_paths, "Trace CSV files")->required();
  compare->add_option("--config", cmp.config_path, "Simulation config (JSON)");
  compare->add_option("--techniques", cmp.techniques, "Comma-separated technique names")
      ->required()
      ->delimiter(',');
  compare->add_option("--out", cmp.out_path, "Report JSON path")->required();
  compare->add_option("--plot-csv", cmp.plot_csv_path, "Bar-plot CSV path");
  add_sim_flags(compare, cmp.overrides);

  std::vector<const char*> argv{"gbrtune"};
  for (const auto& a : args)
    argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0)
      return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*generate) {
      cmd_generate(gen);
      out << "wrote " << gen.count << " trace(s) to " << gen.out_dir << '\n';
    } else if (*simulate) {
      const auto result = cmd_simulate(sim);
      out << technique_name(result.technique)
          << " total_cost=" << format_number(result.aggregate.subscription.total_cost) << '\n';
    } else if (*compare) {
      const auto report = cmd_compare(cmp);
      out << "ranking:";
      for (Technique t : report.ranking)
        out << ' ' << technique_name(t);
      out << '\n';
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

} // namespace gbrtune
