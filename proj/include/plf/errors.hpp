#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plf {

enum class Errc {
  malformed_row,
  gap_too_large,
  empty_file,
  wrong_column_count,
  index_out_of_range,
  invalid_config,
  max_evaluations_exceeded,
  non_finite_objective,
  infeasible,
  unbounded,
  empty_history,
  no_matching_period,
  empty_window,
  bracket_failure,
  window_outside_history,
  insufficient_history,
  rank_deficient,
  zero_actual,
  horizon_mismatch,
  no_tasks,
  missing_prior_year,
  empty_tasks,
  weights_missing,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace plf
