// plf: synthetic data, forecasts, tuning and scoring from the command line.
#include "plf/csv_io.hpp"
#include "plf/errors.hpp"
#include "plf/evaluation.hpp"
#include "plf/pipeline.hpp"
#include "plf/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace plf;

struct DataArgs {
  std::string load;
  std::string temperature;
};

struct KernelArgs {
  std::vector<double> lambda_grid;
  bool circular_week = false;
  std::string ckdw_history_start = "2008-01-01";
  std::string kdew_validation = "previous-month";
  std::string ckdw_validation = "last-week";
  std::string ckdt_validation = "last-week";
  bool bounded = false;
};

struct RunArgs {
  DataArgs data;
  KernelArgs kernel;
  std::string method;
  std::string start;
  std::size_t hours = 0;
  std::string weights;
  std::string kdew_params, ckdw_params, ckdt_params;
  std::string out;
  std::string log;
  std::string window_start, window_end;
  std::vector<std::string> past_tasks;
  std::vector<double> weight_grid;
  int threads = 1;
};

struct SynthArgs {
  std::uint64_t seed = 1;
  int years = 4;
  std::string start = "2005-01-01";
  double noise_scale = 1.0;
  std::string out_dir = ".";
};

struct EvalArgs {
  DataArgs data;
  KernelArgs kernel;
  std::vector<std::string> forecasts;
  std::string name = "forecast";
  std::vector<std::string> methods;
  std::vector<std::string> tasks;
  std::vector<std::string> past_tasks;
  std::string weights;
  int weight_start_task = 1;
  std::string out;
  std::string plot_out;
  int threads = 1;
};

int exit_code(Errc code) {
  switch (code) {
    case Errc::invalid_config:
    case Errc::weights_missing:
    case Errc::no_tasks:
    case Errc::empty_tasks:
      return 1;
    case Errc::max_evaluations_exceeded:
    case Errc::non_finite_objective:
    case Errc::infeasible:
    case Errc::unbounded:
    case Errc::bracket_failure:
    case Errc::rank_deficient:
      return 3;
    default:
      return 2;
  }
}

/// Accepts a bare date as midnight.
Timestamp parse_time(const std::string& text) {
  if (text.size() == 10) return Timestamp::parse(text + "T00:00");
  return Timestamp::parse(text);
}

/// START:HOURS
eval::TaskSpec parse_task(const std::string& text, int id) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 == text.size())
    fail(Errc::invalid_config, "task '" + text + "' must look like START:HOURS");
  eval::TaskSpec task;
  task.id = id;
  task.horizon_start = parse_time(text.substr(0, colon));
  try {
    const long hours = std::stol(text.substr(colon + 1));
    if (hours <= 0) throw std::invalid_argument("nonpositive");
    task.horizon_hours = static_cast<std::size_t>(hours);
  } catch (const std::exception&) {
    fail(Errc::invalid_config, "bad hour count in task '" + text + "'");
  }
  return task;
}

std::vector<eval::TaskSpec> parse_tasks(const std::vector<std::string>& texts) {
  std::vector<eval::TaskSpec> tasks;
  for (const auto& t : texts) tasks.push_back(parse_task(t, static_cast<int>(tasks.size()) + 1));
  return tasks;
}

pipeline::ValidationRegime parse_regime(const std::string& text) {
  if (text == "last-week") return pipeline::ValidationRegime::last_week;
  if (text == "previous-month") return pipeline::ValidationRegime::previous_month;
  fail(Errc::invalid_config, "validation must be last-week or previous-month, got '" + text + "'");
}

kernel::Method kernel_method(pipeline::MethodKind kind) {
  switch (kind) {
    case pipeline::MethodKind::kde_w: return kernel::Method::kde_w;
    case pipeline::MethodKind::ckd_w: return kernel::Method::ckd_w;
    case pipeline::MethodKind::ckd_t: return kernel::Method::ckd_t;
    default: fail(Errc::invalid_config, "not a kernel method");
  }
}

bool needs_temperature(pipeline::MethodKind kind) {
  using K = pipeline::MethodKind;
  return kind == K::ckd_t || kind == K::mix1 || kind == K::mix2 || kind == K::hybrid;
}

std::shared_ptr<const pipeline::Dataset> load_dataset(const DataArgs& args, bool temperature_required) {
  if (args.load.empty()) fail(Errc::invalid_config, "--load is required");
  if (temperature_required && args.temperature.empty())
    fail(Errc::invalid_config, "this method needs --temperature");
  std::optional<HourlySeries> temps;
  if (!args.temperature.empty()) temps = mean_temperature(ingest_temperature_csv(args.temperature));
  return std::make_shared<const pipeline::Dataset>(pipeline::Dataset{ingest_load_csv(args.load), std::move(temps)});
}

pipeline::PipelineConfig make_config(const KernelArgs& k, int threads) {
  pipeline::PipelineConfig cfg;
  if (!k.lambda_grid.empty()) cfg.lambda_grid = k.lambda_grid;
  cfg.cv.kernel.circular_week = k.circular_week;
  if (k.ckdw_history_start.empty() || k.ckdw_history_start == "none") cfg.cv.kernel.ckdw_history_start.reset();
  else cfg.cv.kernel.ckdw_history_start = parse_time(k.ckdw_history_start);
  cfg.kdew_validation = parse_regime(k.kdew_validation);
  cfg.ckdw_validation = parse_regime(k.ckdw_validation);
  cfg.ckdt_validation = parse_regime(k.ckdt_validation);
  cfg.cv.bound_mode = k.bounded ? optim::BoundMode::clamp : optim::BoundMode::log_transform;
  if (threads < 1) fail(Errc::invalid_config, "--threads must be at least 1");
  cfg.threads = threads;
  return cfg;
}

void add_data_options(CLI::App& app, DataArgs& d) {
  app.add_option("--load", d.load, "Load CSV (timestamp,load)");
  app.add_option("--temperature", d.temperature, "Temperature CSV (timestamp,w1..w25)");
}

void add_kernel_options(CLI::App& app, KernelArgs& k) {
  app.add_option("--lambda-grid", k.lambda_grid, "Decay values tried during tuning")->delimiter(',');
  app.add_flag("--circular-week", k.circular_week, "Wrap week-period distances for CKD-W");
  app.add_option("--ckdw-history-start", k.ckdw_history_start, "First hour CKD-W may use, or 'none'");
  app.add_option("--kdew-validation", k.kdew_validation, "last-week or previous-month");
  app.add_option("--ckdw-validation", k.ckdw_validation, "last-week or previous-month");
  app.add_option("--ckdt-validation", k.ckdt_validation, "last-week or previous-month");
  app.add_flag("--bounded", k.bounded, "Clamp bandwidths to their bounds instead of a log transform");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  return out;
}

// ---------------------------------------------------------------- commands

int cmd_synth(const SynthArgs& a) {
  const std::filesystem::path dir(a.out_dir);
  if (!std::filesystem::is_directory(dir)) fail(Errc::io_error, "output directory " + dir.string() + " does not exist");
  SynthConfig cfg;
  cfg.start = parse_time(a.start);
  cfg.years = a.years;
  cfg.noise_scale = a.noise_scale;
  const auto data = generate_synthetic(cfg, a.seed);
  write_load_csv(dir / "load.csv", data.load);
  write_temperature_csv(dir / "temperature.csv", data.temps);
  write_metadata(dir / "metadata.txt", synthetic_metadata(cfg, data));
  return 0;
}

int cmd_forecast(const RunArgs& a) {
  const auto kind = pipeline::parse_method(a.method);
  if (a.start.empty() || a.hours == 0) fail(Errc::invalid_config, "--start and --hours are required");
  if (a.out.empty()) fail(Errc::invalid_config, "--out is required");
  std::optional<hybrid::HybridWeights> weights;
  if (kind == pipeline::MethodKind::hybrid) {
    if (a.weights.empty()) fail(Errc::weights_missing, "hybrid needs --weights (run 'tune --method hybrid' first)");
    weights = hybrid::read_weights(a.weights);
  }
  auto cfg = make_config(a.kernel, a.threads);
  if (!a.kdew_params.empty()) cfg.kdew_params = pipeline::read_kernel_params(a.kdew_params);
  if (!a.ckdw_params.empty()) cfg.ckdw_params = pipeline::read_kernel_params(a.ckdw_params);
  if (!a.ckdt_params.empty()) cfg.ckdt_params = pipeline::read_kernel_params(a.ckdt_params);
  pipeline::ComponentCache cache(load_dataset(a.data, needs_temperature(kind)), cfg);
  const auto forecast = pipeline::forecast_method(kind, cache, parse_time(a.start), a.hours, weights);
  if (!rows_nondecreasing(forecast)) fail(Errc::bracket_failure, "forecast rows are not monotone");
  write_quantile_csv(a.out, forecast);
  return 0;
}

int cmd_tune(const RunArgs& a) {
  const auto kind = pipeline::parse_method(a.method);
  if (a.out.empty()) fail(Errc::invalid_config, "--out is required");
  const auto cfg = make_config(a.kernel, a.threads);
  std::ofstream log_file;
  if (!a.log.empty()) log_file = open_out(a.log);
  std::ostream& log = a.log.empty() ? std::cout : log_file;

  if (kind == pipeline::MethodKind::hybrid) {
    const auto past = parse_tasks(a.past_tasks);
    if (past.empty()) fail(Errc::no_tasks, "hybrid tuning needs --past-task START:HOURS");
    pipeline::ComponentCache cache(load_dataset(a.data, false), cfg);
    const auto grid = a.weight_grid.empty() ? hybrid::default_weight_grid() : a.weight_grid;
    const auto weights = pipeline::train_hybrid_weights(cache, past, grid);
    for (int tau = 2; tau <= 5; ++tau) log << tau << ',' << format_double(weights.at(tau)) << '\n';
    hybrid::write_weights(a.out, weights);
    return 0;
  }

  const auto method = kernel_method(kind);
  pipeline::ComponentCache cache(load_dataset(a.data, kind == pipeline::MethodKind::ckd_t), cfg);
  kernel::CvResult result;
  if (!a.window_start.empty() || !a.window_end.empty()) {
    if (a.window_start.empty() || a.window_end.empty())
      fail(Errc::invalid_config, "--window-start and --window-end go together");
    const kernel::ValidationWindow window{parse_time(a.window_start), parse_time(a.window_end)};
    const HourlySeries* temps = method == kernel::Method::ckd_t ? &*cache.data().temperature : nullptr;
    result = kernel::cross_validate_kernel(method, cache.data().load, temps, window, cache.config().lambda_grid,
                                           cache.config().cv);
  } else {
    if (a.start.empty()) fail(Errc::invalid_config, "tune needs --start or an explicit validation window");
    result = cache.tune(method, parse_time(a.start));
  }
  for (const auto& trial : result.trials) log << format_double(trial.lambda) << ',' << format_double(trial.loss) << '\n';
  pipeline::write_kernel_params(a.out, method, result.params);
  return 0;
}

int cmd_evaluate(const EvalArgs& a) {
  const bool from_files = !a.forecasts.empty();
  if (from_files == !a.methods.empty())
    fail(Errc::invalid_config, "evaluate takes either --forecast files or --methods with --task");
  if (a.data.load.empty()) fail(Errc::invalid_config, "--load is required");

  std::vector<eval::Forecaster> forecasters;
  std::vector<eval::TaskSpec> tasks;
  HourlySeries load = ingest_load_csv(a.data.load);

  if (from_files) {
    // Each file is one task of the named method, numbered by start time.
    std::vector<QuantileForecast> files;
    for (const auto& path : a.forecasts) files.push_back(read_quantile_csv(path));
    std::stable_sort(files.begin(), files.end(),
                     [](const QuantileForecast& x, const QuantileForecast& y) { return x.start() < y.start(); });
    for (const auto& f : files) tasks.push_back({static_cast<int>(tasks.size()) + 1, f.start(), f.hours()});
    auto shared = std::make_shared<std::vector<QuantileForecast>>(std::move(files));
    forecasters.push_back({a.name, [shared](const eval::TaskSpec& task) { return (*shared)[task.id - 1]; }});
  } else {
    tasks = parse_tasks(a.tasks);
    if (tasks.empty()) fail(Errc::no_tasks, "--methods needs at least one --task START:HOURS");
    std::vector<pipeline::MethodKind> kinds;
    bool temps = false, wants_hybrid = false;
    for (const auto& m : a.methods) {
      kinds.push_back(pipeline::parse_method(m));
      temps = temps || needs_temperature(kinds.back());
      wants_hybrid = wants_hybrid || kinds.back() == pipeline::MethodKind::hybrid;
    }
    auto cache = std::make_shared<pipeline::ComponentCache>(load_dataset(a.data, temps), make_config(a.kernel, a.threads));
    std::optional<hybrid::HybridWeights> weights;
    if (!a.weights.empty()) {
      weights = hybrid::read_weights(a.weights);
    } else if (wants_hybrid) {
      const auto past = parse_tasks(a.past_tasks);
      if (past.empty()) fail(Errc::weights_missing, "hybrid needs --weights or --past-task");
      weights = pipeline::train_hybrid_weights(*cache, past, hybrid::default_weight_grid());
    }
    forecasters = pipeline::make_forecasters(kinds, cache, weights);
  }

  const auto table = eval::run_tasks(forecasters, load, tasks, a.weight_start_task);
  if (a.out.empty()) {
    eval::write_score_csv(std::cout, table);
  } else {
    auto out = open_out(a.out);
    eval::write_score_csv(out, table);
  }
  if (!a.plot_out.empty()) {
    auto plot = open_out(a.plot_out);
    eval::write_plot_csv(plot, table);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic load forecasting: kernel densities, quantile regression and their hybrid"};
  app.set_config("--config", "", "Key=value config file; command-line flags take precedence");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write synthetic load, temperature and metadata files");
  synth_cmd->add_option("--seed", synth.seed, "Random seed");
  synth_cmd->add_option("--years", synth.years, "Years of hourly data");
  synth_cmd->add_option("--start", synth.start, "First hour (YYYY-MM-DD[THH:MM])");
  synth_cmd->add_option("--noise-scale", synth.noise_scale, "Multiplier on every noise term");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Existing output directory");

  RunArgs forecast;
  auto* forecast_cmd = app.add_subcommand("forecast", "Write a 99-quantile forecast CSV");
  add_data_options(*forecast_cmd, forecast.data);
  add_kernel_options(*forecast_cmd, forecast.kernel);
  forecast_cmd->add_option("--method", forecast.method, "kde-w|ckd-w|ckd-t|qr|mix1|mix2|hybrid|benchmark")->required();
  forecast_cmd->add_option("--start", forecast.start, "First forecast hour");
  forecast_cmd->add_option("--hours", forecast.hours, "Horizon length in hours");
  forecast_cmd->add_option("--weights", forecast.weights, "Hybrid weights file");
  forecast_cmd->add_option("--kdew-params", forecast.kdew_params, "Fixed KDE-W parameters (skips tuning)");
  forecast_cmd->add_option("--ckdw-params", forecast.ckdw_params, "Fixed CKD-W parameters (skips tuning)");
  forecast_cmd->add_option("--ckdt-params", forecast.ckdt_params, "Fixed CKD-T parameters (skips tuning)");
  forecast_cmd->add_option("--out", forecast.out, "Output CSV");
  forecast_cmd->add_option("--threads", forecast.threads, "Worker cap");

  RunArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "Cross-validate kernel parameters or train hybrid weights");
  add_data_options(*tune_cmd, tune.data);
  add_kernel_options(*tune_cmd, tune.kernel);
  tune_cmd->add_option("--method", tune.method, "kde-w|ckd-w|ckd-t|hybrid")->required();
  tune_cmd->add_option("--start", tune.start, "Horizon start the validation window precedes");
  tune_cmd->add_option("--window-start", tune.window_start, "Explicit validation window start");
  tune_cmd->add_option("--window-end", tune.window_end, "Explicit validation window end (exclusive)");
  tune_cmd->add_option("--past-task", tune.past_tasks, "Hybrid training horizon START:HOURS (repeatable)");
  tune_cmd->add_option("--weight-grid", tune.weight_grid, "Hybrid weight candidates")->delimiter(',');
  tune_cmd->add_option("--out", tune.out, "Parameter or weights file");
  tune_cmd->add_option("--log", tune.log, "Per-grid-point log (default stdout)");
  tune_cmd->add_option("--threads", tune.threads, "Worker cap");

  EvalArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score forecasts against actuals and the benchmark");
  add_data_options(*eval_cmd, evaluate.data);
  add_kernel_options(*eval_cmd, evaluate.kernel);
  eval_cmd->add_option("--forecast", evaluate.forecasts, "Forecast CSV, one task each (repeatable)");
  eval_cmd->add_option("--name", evaluate.name, "Method name for --forecast files");
  eval_cmd->add_option("--methods", evaluate.methods, "Methods to run on --task horizons")->delimiter(',');
  eval_cmd->add_option("--task", evaluate.tasks, "Task horizon START:HOURS (repeatable)");
  eval_cmd->add_option("--past-task", evaluate.past_tasks, "Hybrid training horizon START:HOURS (repeatable)");
  eval_cmd->add_option("--weights", evaluate.weights, "Hybrid weights file");
  eval_cmd->add_option("--weight-start-task", evaluate.weight_start_task, "Task where linear weighting starts");
  eval_cmd->add_option("--out", evaluate.out, "Score CSV (default stdout)");
  eval_cmd->add_option("--plot-out", evaluate.plot_out, "task,method,pinball CSV for plotting");
  eval_cmd->add_option("--threads", evaluate.threads, "Worker cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth);
    if (*forecast_cmd) return cmd_forecast(forecast);
    if (*tune_cmd) return cmd_tune(tune);
    if (*eval_cmd) return cmd_evaluate(evaluate);
  } catch (const Error& e) {
    std::fprintf(stderr, "plf: %s\n", e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "plf: %s\n", e.what());
    return 2;
  }
  return 1;
}
