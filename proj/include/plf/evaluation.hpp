#pragma once

#include "plf/forecast.hpp"
#include "plf/series.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace plf::eval {

/// Mean pinball over every hour and quantile. The actuals must cover the
/// forecast hours; throws horizon_mismatch otherwise.
double pinball_score(const QuantileForecast& forecast, const HourlySeries& actuals);

/// Last year's load at the same date and hour in all 99 columns (29 Feb uses
/// 28 Feb). Throws missing_prior_year.
QuantileForecast benchmark_forecast(const HourlySeries& history, Timestamp horizon_start,
                                    std::size_t horizon_hours);

struct TaskScore {
  int task_id = 0;
  double pinball = 0.0;
  double benchmark_pinball = 0.0;
  double improvement_pct = 0.0;
};

TaskScore make_task_score(int task_id, double pinball, double benchmark_pinball);

/// Task weight max(1, t - weight_start_task + 1), normalized; returns the
/// weighted mean improvement. Throws empty_tasks.
double weighted_final_score(std::span<const TaskScore> tasks, int weight_start_task);

struct TaskSpec {
  int id = 1;
  Timestamp horizon_start;  // training data ends here
  std::size_t horizon_hours = 0;
};

struct Forecaster {
  std::string name;
  std::function<QuantileForecast(const TaskSpec&)> forecast;
};

struct ScoreRow {
  std::string method;
  int task = 0;
  double pinball = 0.0;
  double benchmark_pinball = 0.0;
  double improvement_pct = 0.0;
  double weighted_score = 0.0;
};

/// Rows grouped by method in descending weighted score (ties by name), tasks
/// ascending within a method.
struct ScoreTable {
  std::vector<ScoreRow> rows;
};

/// Forecasts every task with every method, in order, and scores against `load`
/// (which must hold the actuals) and the benchmark.
ScoreTable run_tasks(std::span<const Forecaster> methods, const HourlySeries& load,
                     std::span<const TaskSpec> tasks, int weight_start_task);

ScoreTable run_task(std::span<const Forecaster> methods, const HourlySeries& load, const TaskSpec& task);

/// `method,task,pinball,benchmark_pinball,improvement_pct,weighted_score`
void write_score_csv(std::ostream& out, const ScoreTable& table);
/// `task,method,pinball`
void write_plot_csv(std::ostream& out, const ScoreTable& table);

}  // namespace plf::eval
