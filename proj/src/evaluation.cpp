#include "plf/evaluation.hpp"

#include "plf/csv_io.hpp"
#include "plf/errors.hpp"

#include <algorithm>
#include <ostream>

namespace plf::eval {

double pinball_score(const QuantileForecast& forecast, const HourlySeries& actuals) {
  if (forecast.hours() == 0) fail(Errc::horizon_mismatch, "forecast is empty");
  const auto& levels = quantile_levels();
  double sum = 0.0;
  for (std::size_t h = 0; h < forecast.hours(); ++h) {
    const auto idx = actuals.index_of(forecast.time_at(h));
    if (!idx) fail(Errc::horizon_mismatch, "no actual for " + forecast.time_at(h).iso());
    const double y = actuals[*idx];
    const auto row = forecast.row(h);
    for (std::size_t k = 0; k < kQuantileCount; ++k) sum += pinball_loss_term(levels[k], y - row[k]);
  }
  return sum / static_cast<double>(forecast.hours() * kQuantileCount);
}

QuantileForecast benchmark_forecast(const HourlySeries& history, Timestamp horizon_start, std::size_t horizon_hours) {
  if (horizon_hours == 0) fail(Errc::invalid_config, "horizon must contain at least one hour");
  QuantileForecast out(horizon_start, horizon_hours);
  for (std::size_t h = 0; h < horizon_hours; ++h) {
    const auto prior = same_date_years_earlier(out.time_at(h), 1);
    const auto idx = history.index_of(prior);
    if (!idx || prior >= horizon_start)
      fail(Errc::missing_prior_year, "no load at " + prior.iso() + " for the benchmark");
    auto row = out.row(h);
    std::fill(row.begin(), row.end(), history[*idx]);
  }
  return out;
}

TaskScore make_task_score(int task_id, double pinball, double benchmark_pinball) {
  TaskScore s{task_id, pinball, benchmark_pinball, 0.0};
  if (benchmark_pinball > 0.0) s.improvement_pct = 100.0 * (benchmark_pinball - pinball) / benchmark_pinball;
  return s;
}

double weighted_final_score(std::span<const TaskScore> tasks, int weight_start_task) {
  if (tasks.empty()) fail(Errc::empty_tasks, "no task scores to combine");
  double total_weight = 0.0, sum = 0.0;
  for (const auto& t : tasks) {
    const double w = std::max(1, t.task_id - weight_start_task + 1);
    total_weight += w;
    sum += w * t.improvement_pct;
  }
  return sum / total_weight;
}

ScoreTable run_tasks(std::span<const Forecaster> methods, const HourlySeries& load, std::span<const TaskSpec> tasks,
                     int weight_start_task) {
  if (tasks.empty()) fail(Errc::empty_tasks, "no tasks to run");
  auto ordered = std::vector<TaskSpec>(tasks.begin(), tasks.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  std::vector<double> benchmark_scores;
  for (const auto& task : ordered)
    benchmark_scores.push_back(
        pinball_score(benchmark_forecast(load, task.horizon_start, task.horizon_hours), load));

  struct MethodRows {
    std::string name;
    std::vector<ScoreRow> rows;
    double weighted = 0.0;
  };
  std::vector<MethodRows> per_method;
  for (const auto& m : methods) {
    MethodRows mr{m.name, {}, 0.0};
    std::vector<TaskScore> scores;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      const auto& task = ordered[i];
      const auto fc = m.forecast(task);
      if (fc.start() != task.horizon_start || fc.hours() != task.horizon_hours)
        fail(Errc::horizon_mismatch, m.name + " returned a forecast for a different horizon");
      scores.push_back(make_task_score(task.id, pinball_score(fc, load), benchmark_scores[i]));
    }
    mr.weighted = weighted_final_score(scores, weight_start_task);
    for (const auto& s : scores)
      mr.rows.push_back({m.name, s.task_id, s.pinball, s.benchmark_pinball, s.improvement_pct, mr.weighted});
    per_method.push_back(std::move(mr));
  }
  std::stable_sort(per_method.begin(), per_method.end(), [](const MethodRows& a, const MethodRows& b) {
    if (a.weighted != b.weighted) return a.weighted > b.weighted;
    return a.name < b.name;
  });
  ScoreTable table;
  for (auto& mr : per_method) table.rows.insert(table.rows.end(), mr.rows.begin(), mr.rows.end());
  return table;
}

ScoreTable run_task(std::span<const Forecaster> methods, const HourlySeries& load, const TaskSpec& task) {
  return run_tasks(methods, load, std::span<const TaskSpec>(&task, 1), task.id);
}

void write_score_csv(std::ostream& out, const ScoreTable& table) {
  out << "method,task,pinball,benchmark_pinball,improvement_pct,weighted_score\n";
  for (const auto& r : table.rows)
    out << r.method << ',' << r.task << ',' << format_double(r.pinball) << ',' << format_double(r.benchmark_pinball)
        << ',' << format_double(r.improvement_pct) << ',' << format_double(r.weighted_score) << '\n';
}

void write_plot_csv(std::ostream& out, const ScoreTable& table) {
  out << "task,method,pinball\n";
  auto rows = table.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.task < b.task; });
  for (const auto& r : rows) out << r.task << ',' << r.method << ',' << format_double(r.pinball) << '\n';
}

}  // namespace plf::eval
